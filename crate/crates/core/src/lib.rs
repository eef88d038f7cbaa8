//! Numerical laboratory for heat conduction through thin anisotropic
//! coatings and the boundary conditions that replace them.
//!
//! A conducting bulk occupies a periodic slab below a flat torus; a thin
//! coating of thickness `delta` sits on top. The coating is "optimally
//! aligned": its conductivity tensor has the interface normal as an
//! eigenvector, with normal conductivity `sigma` and tangential
//! conductivities `mu1`, `mu2` (equal for Type I coatings). As `delta`
//! shrinks under a power-law scaling of the conductivities, the coating's
//! influence on the bulk collapses to an effective boundary condition (EBC)
//! on the interface — anything from plain Dirichlet/Neumann/Robin conditions
//! to nonlocal Dirichlet-to-Neumann operators, fractional Laplacians, and
//! surface-diffusion laws.
//!
//! The crate provides:
//!
//! - [`geometry`]: the flat-torus Fourier calculus (modes, transforms,
//!   discrete norms) shared by everything else;
//! - [`scaling`]: power-law conductivity scalings and their classification
//!   into the effective boundary condition they induce;
//! - [`operators`]: the per-mode boundary symbols behind the nonlocal EBCs,
//!   a finite-difference cell-problem oracle, and asymptotic diagnostics;
//! - [`full`]: the full two-domain solver (bulk + resolved coating, coupled
//!   by interface transmission conditions);
//! - [`effective`]: the bulk-only solver closed by any EBC;
//! - [`harness`]: thickness sweeps that measure the distance between the
//!   full and effective solutions, plus report writers;
//! - [`config`]: the JSON configuration schema used by the `ebc` CLI.
//!
//! All numerics are generic over the scalar type through [`Real`]; the
//! `*64` aliases at the crate root fix `f64`, which is what the CLI and the
//! shipped configurations use.

pub mod config;
pub mod data;
pub mod effective;
pub mod error;
pub mod fit;
pub mod full;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod operators;
pub mod scaling;
pub mod stepping;
pub mod tridiag;

pub use error::Error;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};

/// Scalar type the numerics are generic over.
///
/// Implemented by `f32` and `f64`. The solvers and reports only need what
/// `num-traits` offers plus formatting; the blanket impl below picks up any
/// float-like type with those capabilities.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Shorthand for pulling literals into the generic scalar type.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("literal not representable in scalar type")
    }

    /// Conversion of grid sizes and counters.
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("count not representable in scalar type")
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

/// Concrete `f64` instantiations; the CLI and shipped configs use these.
pub type TorusSpec64 = geometry::TorusSpec<f64>;
pub type ModeIndex64 = geometry::ModeIndex<f64>;
pub type RadialGrid64 = geometry::RadialGrid<f64>;
pub type SurfaceFunction64 = geometry::SurfaceFunction<f64>;
pub type SpectralField64 = geometry::SpectralField<f64>;
pub type ScalingLaw64 = scaling::ScalingLaw<f64>;
pub type CoatingScaling64 = scaling::CoatingScaling<f64>;
pub type EbcKind64 = scaling::EbcKind<f64>;
pub type RegimeReport64 = scaling::RegimeReport<f64>;
pub type OperatorSpec64 = operators::OperatorSpec<f64>;
pub type FullProblemSpec64 = full::FullProblemSpec<f64>;
pub type EffectiveProblemSpec64 = effective::EffectiveProblemSpec<f64>;
pub type Trajectory64 = stepping::Trajectory<f64>;
pub type ExperimentConfig64 = harness::ExperimentConfig<f64>;
pub type ConvergenceReport64 = harness::ConvergenceReport<f64>;
