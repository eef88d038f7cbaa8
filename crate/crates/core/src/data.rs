//! Reproducible problem data: initial conditions and sources given as
//! finite mode lists with named radial profiles and time factors, so a JSON
//! config pins a run exactly.

use crate::error::{Error, Result};
use crate::geometry::{RadialMesh, SpectralField, TorusSpec};
use crate::Real;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Radial dependence of one data entry, evaluated at node positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum RadialProfile<T> {
    /// `a`
    Constant { a: T },
    /// `a + b r`
    Linear { a: T, b: T },
    /// `amplitude * exp(-((r - center) / width)^2)`
    Gaussian { center: T, width: T, amplitude: T },
}

impl<T: Real> RadialProfile<T> {
    pub fn eval(&self, r: T) -> T {
        match *self {
            RadialProfile::Constant { a } => a,
            RadialProfile::Linear { a, b } => a + b * r,
            RadialProfile::Gaussian {
                center,
                width,
                amplitude,
            } => {
                let z = (r - center) / width;
                amplitude * (-(z * z)).exp()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: T| v.is_finite();
        let ok = match *self {
            RadialProfile::Constant { a } => finite(a),
            RadialProfile::Linear { a, b } => finite(a) && finite(b),
            RadialProfile::Gaussian {
                center,
                width,
                amplitude,
            } => finite(center) && finite(amplitude) && width > T::zero() && finite(width),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(
                "radial profile parameters out of range".into(),
            ))
        }
    }
}

/// Multiplicative time dependence of a source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeFactor<T> {
    #[default]
    One,
    /// `exp(-rate t)`
    ExpDecay { rate: T },
    /// `cos(omega t)`
    Cosine { omega: T },
}

impl<T: Real> TimeFactor<T> {
    pub fn eval(&self, t: T) -> T {
        match *self {
            TimeFactor::One => T::one(),
            TimeFactor::ExpDecay { rate } => (-rate * t).exp(),
            TimeFactor::Cosine { omega } => (omega * t).cos(),
        }
    }
}

/// One real surface harmonic times a radial profile:
/// `(cos_amp cos(k.s) + sin_amp sin(k.s)) * profile(r)`.
///
/// Real amplitudes keep the represented field real without the config
/// having to list conjugate mode pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + num_traits::Zero"))]
pub struct ModeEntry<T> {
    pub m: i64,
    pub n: i64,
    #[serde(default = "zero")]
    pub cos: T,
    #[serde(default = "zero")]
    pub sin: T,
    pub profile: RadialProfile<T>,
}

fn zero<T: num_traits::Zero>() -> T {
    T::zero()
}

/// A finite sum of mode entries; used for initial data and (with a time
/// factor) for sources.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + num_traits::Zero"))]
pub struct FieldData<T> {
    pub entries: Vec<ModeEntry<T>>,
}

/// A source term: mode entries with one shared time factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + num_traits::Zero"))]
pub struct SourceData<T> {
    pub entries: Vec<ModeEntry<T>>,
    #[serde(default)]
    pub time: TimeFactor<T>,
}

impl<T: Real> FieldData<T> {
    pub fn validate(&self, torus: &TorusSpec<T>) -> Result<()> {
        validate_entries(&self.entries, torus)
    }

    /// Materialize the field on a mesh at time zero.
    pub fn instantiate(
        &self,
        torus: TorusSpec<T>,
        mesh: Arc<RadialMesh<T>>,
    ) -> Result<SpectralField<T>> {
        instantiate_entries(&self.entries, torus, mesh, T::zero())
    }
}

impl<T: Real> SourceData<T> {
    pub fn validate(&self, torus: &TorusSpec<T>) -> Result<()> {
        validate_entries(&self.entries, torus)
    }

    /// The spatial part; stepping scales it by `time.eval(t)`.
    pub fn spatial_part(
        &self,
        torus: TorusSpec<T>,
        mesh: Arc<RadialMesh<T>>,
    ) -> Result<SpectralField<T>> {
        instantiate_entries(&self.entries, torus, mesh, T::zero())
    }
}

fn validate_entries<T: Real>(entries: &[ModeEntry<T>], torus: &TorusSpec<T>) -> Result<()> {
    for e in entries {
        if torus.mode_position(e.m, e.n).is_none() {
            return Err(Error::InvalidSpec(format!(
                "data mode ({}, {}) outside the retained band",
                e.m, e.n
            )));
        }
        if !(e.cos.is_finite() && e.sin.is_finite()) {
            return Err(Error::InvalidSpec("data amplitudes must be finite".into()));
        }
        e.profile.validate()?;
    }
    Ok(())
}

fn instantiate_entries<T: Real>(
    entries: &[ModeEntry<T>],
    torus: TorusSpec<T>,
    mesh: Arc<RadialMesh<T>>,
    time: T,
) -> Result<SpectralField<T>> {
    let mut field = SpectralField::zero(torus, mesh.clone(), time);
    let half_root_area = torus.area().sqrt() * T::of(0.5);
    for e in entries {
        let plus = torus
            .mode_position(e.m, e.n)
            .ok_or_else(|| Error::InvalidSpec(format!("mode ({}, {}) out of band", e.m, e.n)))?;
        let minus = torus
            .mode_position(-e.m, -e.n)
            .expect("band closed under negation");
        // cos(k.s) = (e+ + e-)/2, sin(k.s) = -i/2 (e+ - e-), both scaled by
        // sqrt(area) against the unit-norm mode functions.
        let c_plus = Complex::new(half_root_area * e.cos, -half_root_area * e.sin);
        let c_minus = c_plus.conj();
        for node in 0..mesh.len() {
            let p = e.profile.eval(mesh.nodes[node]);
            let add_plus = Complex::new(c_plus.re * p, c_plus.im * p);
            let add_minus = Complex::new(c_minus.re * p, c_minus.im * p);
            field.set_coeff(plus, node, field.coeff(plus, node) + add_plus);
            field.set_coeff(minus, node, field.coeff(minus, node) + add_minus);
        }
    }
    Ok(field)
}
