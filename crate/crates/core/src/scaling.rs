//! Power-law conductivity scalings and their classification into effective
//! boundary conditions.
//!
//! A coating is described by the normal conductivity `sigma(delta)` and the
//! tangential conductivities `mu1(delta) >= mu2(delta)`, all positive power
//! laws of the thickness. As `delta -> 0` only a handful of limits matter:
//!
//! - `alpha  = lim sigma / delta`
//! - `gamma_i = lim sqrt(sigma * mu_i)`
//! - `beta_i  = lim mu_i * delta`
//! - `c      = lim mu2 / mu1` (anisotropy ratio)
//! - `H_i    = lim delta * sqrt(mu_i / sigma)` (rescaled cap height)
//!
//! [`classify`] evaluates these limits exactly on the exponents and selects
//! the unique effective boundary condition cell for the given outer boundary
//! condition. Power laws make every limit computable symbolically; nothing
//! is ever evaluated at a small numerical `delta`.

use crate::error::{Error, Result};
use crate::operators::{Cap, CapVariant};
use crate::Real;
use serde::{Deserialize, Serialize};

/// Outer boundary condition of the original two-domain problem, imposed at
/// the top of the coating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterBc {
    Dirichlet,
    Neumann,
}

/// A positive power law `value(delta) = prefactor * delta^exponent`.
///
/// Products, quotients and square roots of power laws are power laws again,
/// so every limit the classification needs reduces to [`ScalingLaw::limit`]
/// on one of these monomials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingLaw<T> {
    pub prefactor: T,
    pub exponent: T,
}

impl<T: Real> ScalingLaw<T> {
    pub fn new(prefactor: T, exponent: T) -> Result<Self> {
        if !(prefactor > T::zero() && prefactor.is_finite() && exponent.is_finite()) {
            return Err(Error::InvalidSpec(
                "scaling law needs a positive finite prefactor and finite exponent".into(),
            ));
        }
        Ok(Self {
            prefactor,
            exponent,
        })
    }

    /// The constant law `value(delta) = c`.
    pub fn constant(c: T) -> Result<Self> {
        Self::new(c, T::zero())
    }

    /// The law `delta^1`.
    pub fn delta() -> Self {
        Self {
            prefactor: T::one(),
            exponent: T::one(),
        }
    }

    pub fn value(&self, delta: T) -> T {
        self.prefactor * delta.powf(self.exponent)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            prefactor: self.prefactor * other.prefactor,
            exponent: self.exponent + other.exponent,
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        Self {
            prefactor: self.prefactor / other.prefactor,
            exponent: self.exponent - other.exponent,
        }
    }

    pub fn sqrt(&self) -> Self {
        Self {
            prefactor: self.prefactor.sqrt(),
            exponent: self.exponent * T::of(0.5),
        }
    }

    /// Multiply by `delta^p`.
    pub fn times_delta_pow(&self, p: T) -> Self {
        Self {
            prefactor: self.prefactor,
            exponent: self.exponent + p,
        }
    }

    /// Exact limit as `delta -> 0`: positive exponent vanishes, zero
    /// exponent keeps the prefactor, negative exponent blows up.
    pub fn limit(&self) -> LimitValue<T> {
        if self.exponent > T::zero() {
            LimitValue::Zero
        } else if self.exponent == T::zero() {
            LimitValue::Finite(self.prefactor)
        } else {
            LimitValue::Infinity
        }
    }
}

/// Exact limit of a monomial expression in the scaling laws and `delta`.
pub fn limit_of<T: Real>(expr: &ScalingLaw<T>) -> LimitValue<T> {
    expr.limit()
}

/// A limit in the extended half line `[0, infinity]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", content = "value", rename_all = "snake_case")]
pub enum LimitValue<T> {
    Zero,
    Finite(T),
    Infinity,
}

impl<T: Real> LimitValue<T> {
    pub fn is_zero(&self) -> bool {
        matches!(self, LimitValue::Zero)
    }

    pub fn finite(&self) -> Option<T> {
        match self {
            LimitValue::Finite(v) => Some(*v),
            _ => None,
        }
    }

    fn describe(&self) -> &'static str {
        match self {
            LimitValue::Zero => "0",
            LimitValue::Finite(_) => "finite",
            LimitValue::Infinity => "inf",
        }
    }

    /// Convert an `h`-limit into a cap height; `Zero` is not a valid cap.
    fn as_cap(&self) -> Result<Cap<T>> {
        match self {
            LimitValue::Finite(h) => Ok(Cap::Finite(*h)),
            LimitValue::Infinity => Ok(Cap::Infinite),
            LimitValue::Zero => Err(Error::UnsupportedRegime(
                "cap height limit degenerated to zero where a positive cap was expected".into(),
            )),
        }
    }
}

/// Whether the two tangential conductivities coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoatingType {
    #[serde(rename = "type_i")]
    TypeI,
    #[serde(rename = "type_ii")]
    TypeII,
}

/// The conductivity scaling of a coating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoatingScaling<T> {
    pub sigma: ScalingLaw<T>,
    pub mu1: ScalingLaw<T>,
    pub mu2: ScalingLaw<T>,
    pub coating_type: CoatingType,
}

impl<T: Real> CoatingScaling<T> {
    /// Isotropic tangential conductivity: `mu1 = mu2 = mu`.
    pub fn type_i(sigma: ScalingLaw<T>, mu: ScalingLaw<T>) -> Self {
        Self {
            sigma,
            mu1: mu,
            mu2: mu,
            coating_type: CoatingType::TypeI,
        }
    }

    /// Distinct tangential conductivities; requires `mu1 >= mu2` for small
    /// `delta` (smaller exponent wins as `delta -> 0`).
    pub fn type_ii(sigma: ScalingLaw<T>, mu1: ScalingLaw<T>, mu2: ScalingLaw<T>) -> Result<Self> {
        let ordered = mu1.exponent < mu2.exponent
            || (mu1.exponent == mu2.exponent && mu1.prefactor >= mu2.prefactor);
        if !ordered {
            return Err(Error::InvalidSpec(
                "type II coating needs mu1 >= mu2 for small delta".into(),
            ));
        }
        Ok(Self {
            sigma,
            mu1,
            mu2,
            coating_type: CoatingType::TypeII,
        })
    }

    /// Rescaled cap heights `h_i = delta * sqrt(mu_i / sigma)` as monomials.
    pub fn cap_law(&self, tangential: &ScalingLaw<T>) -> ScalingLaw<T> {
        tangential.div(&self.sigma).sqrt().times_delta_pow(T::one())
    }
}

/// The integral flux rule attached to a constant-trace condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TraceFlux<T> {
    /// `int_Gamma dv/dn = 0`
    ZeroFlux,
    /// `int_Gamma (k dv/dn + alpha v) = 0`
    RobinIntegral { alpha: T },
}

/// The per-line flux rule attached to a trace constant in `s1`; the rules
/// act on the `m = 0` mode sector, i.e. along `s2` only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum S1Flux<T> {
    ZeroFlux,
    RobinIntegral {
        alpha: T,
    },
    /// `int (k dv/dn - gamma2 D[v]) = 0` with `D` the cap operator along
    /// `s2`.
    Dtn {
        variant: CapVariant,
        gamma: T,
        cap: Cap<T>,
    },
    /// `int (k dv/dn - beta2 d^2v/ds2^2) = 0`.
    SurfaceDiffusion {
        beta: T,
    },
}

/// Which per-mode eigenvalue a nonlocal boundary operator consumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DtnFamily<T> {
    /// Full surface Laplacian eigenvalue `k1^2 + k2^2`.
    Isotropic,
    /// Anisotropic eigenvalue `k1^2 + c k2^2`, `c in (0, 1]`.
    Anisotropic { c: T },
    /// Degenerate: `k1^2` only.
    AxisS1,
}

/// Every effective boundary condition the classification can produce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EbcKind<T> {
    /// `v = 0`
    DirichletZero,
    /// `dv/dn = 0`
    NeumannZero,
    /// `k dv/dn = -alpha v`
    Robin { alpha: T },
    /// `k dv/dn = gamma Op^H[v]` with a Dirichlet- or Neumann-capped
    /// boundary operator over the given eigenvalue family.
    Dtn {
        #[serde(flatten)]
        family: DtnFamily<T>,
        variant: CapVariant,
        gamma: T,
        cap: Cap<T>,
    },
    /// `k dv/dn = beta (d^2v/ds1^2 + c d^2v/ds2^2)`, `c in [0, 1]`; `c = 1`
    /// is the surface Laplacian.
    SurfaceDiffusion { beta: T, c: T },
    /// Trace spatially constant plus one integral flux law over the torus.
    ConstantTrace { flux: TraceFlux<T> },
    /// Trace constant in `s1` plus a flux law on the `m = 0` sector.
    ConstantInS1 { flux: S1Flux<T> },
}

impl<T: Real> EbcKind<T> {
    /// Check parameter positivity and ranges.
    pub fn validate(&self) -> Result<()> {
        let pos = |v: T, what: &str| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("{what} must be positive")))
            }
        };
        let cap_ok = |cap: &Cap<T>| match cap {
            Cap::Finite(h) => pos(*h, "cap height"),
            Cap::Infinite => Ok(()),
        };
        match self {
            EbcKind::DirichletZero | EbcKind::NeumannZero => Ok(()),
            EbcKind::Robin { alpha } => pos(*alpha, "robin coefficient"),
            EbcKind::Dtn {
                family, gamma, cap, ..
            } => {
                pos(*gamma, "dtn multiplier")?;
                cap_ok(cap)?;
                if let DtnFamily::Anisotropic { c } = family {
                    if !(*c > T::zero() && *c <= T::one()) {
                        return Err(Error::InvalidSpec(
                            "anisotropy ratio must lie in (0, 1]".into(),
                        ));
                    }
                }
                Ok(())
            }
            EbcKind::SurfaceDiffusion { beta, c } => {
                pos(*beta, "surface diffusion rate")?;
                if !(*c >= T::zero() && *c <= T::one()) {
                    return Err(Error::InvalidSpec(
                        "anisotropy ratio must lie in [0, 1]".into(),
                    ));
                }
                Ok(())
            }
            EbcKind::ConstantTrace { flux } => match flux {
                TraceFlux::ZeroFlux => Ok(()),
                TraceFlux::RobinIntegral { alpha } => pos(*alpha, "robin coefficient"),
            },
            EbcKind::ConstantInS1 { flux } => match flux {
                S1Flux::ZeroFlux => Ok(()),
                S1Flux::RobinIntegral { alpha } => pos(*alpha, "robin coefficient"),
                S1Flux::Dtn { gamma, cap, .. } => {
                    pos(*gamma, "dtn multiplier")?;
                    cap_ok(cap)
                }
                S1Flux::SurfaceDiffusion { beta } => pos(*beta, "surface diffusion rate"),
            },
        }
    }
}

/// Everything [`classify`] decided and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport<T> {
    pub outer_bc: OuterBc,
    pub coating_type: CoatingType,
    /// `lim sigma / delta`
    pub alpha: LimitValue<T>,
    /// `lim sqrt(sigma * mu1)`
    pub gamma1: LimitValue<T>,
    /// `lim mu1 * delta`
    pub beta1: LimitValue<T>,
    /// `lim sqrt(sigma * mu2)`; `None` for Type I
    pub gamma2: Option<LimitValue<T>>,
    /// `lim mu2 * delta`; `None` for Type I
    pub beta2: Option<LimitValue<T>>,
    /// Anisotropy ratio `lim mu2 / mu1`; `None` for Type I
    pub anisotropy: Option<LimitValue<T>>,
    /// Cap height limit `lim delta sqrt(mu1 / sigma)`
    pub cap1: LimitValue<T>,
    /// Cap height limit with `mu2`; `None` for Type I
    pub cap2: Option<LimitValue<T>>,
    /// `lim delta^2 mu1 / mu2`, recorded when the degenerate (c = 0) branch
    /// applies; classification refuses unless it is zero.
    pub degenerate_ratio: Option<LimitValue<T>>,
    /// The selected effective boundary condition.
    pub ebc: EbcKind<T>,
    /// Human-readable name of the classification cell.
    pub cell: String,
}

/// Select the effective boundary condition for an outer boundary condition
/// and a coating scaling.
///
/// Errors: [`Error::HypothesisViolated`] when the degenerate branch is
/// entered without `delta^2 mu1 / mu2 -> 0`; [`Error::UnsupportedRegime`]
/// when the limit pattern falls outside the classification (cannot happen
/// for validated power laws, but guards direct struct construction).
pub fn classify<T: Real>(
    outer_bc: OuterBc,
    scaling: &CoatingScaling<T>,
) -> Result<RegimeReport<T>> {
    let delta = ScalingLaw::delta();
    let alpha = scaling.sigma.div(&delta).limit();
    let sigma_mu1 = scaling.sigma.mul(&scaling.mu1).limit();
    let gamma1 = scaling.sigma.mul(&scaling.mu1).sqrt().limit();
    let beta1 = scaling.mu1.mul(&delta).limit();
    let cap1 = scaling.cap_law(&scaling.mu1).limit();

    let report = |ebc: EbcKind<T>, cell: String| RegimeReport {
        outer_bc,
        coating_type: scaling.coating_type,
        alpha,
        gamma1,
        beta1,
        gamma2: None,
        beta2: None,
        anisotropy: None,
        cap1,
        cap2: None,
        degenerate_ratio: None,
        ebc,
        cell,
    };

    match scaling.coating_type {
        CoatingType::TypeI => {
            let (ebc, cell) = classify_nondegenerate(
                outer_bc,
                DtnFamily::Isotropic,
                T::one(),
                sigma_mu1,
                gamma1,
                alpha,
                beta1,
                cap1,
                "type-i",
            )?;
            let rep = report(ebc, cell);
            rep.ebc.validate()?;
            Ok(rep)
        }
        CoatingType::TypeII => {
            let c_lim = scaling.mu2.div(&scaling.mu1).limit();
            let sigma_mu2 = scaling.sigma.mul(&scaling.mu2).limit();
            let gamma2 = scaling.sigma.mul(&scaling.mu2).sqrt().limit();
            let beta2 = scaling.mu2.mul(&delta).limit();
            let cap2 = scaling.cap_law(&scaling.mu2).limit();

            let fill = |mut rep: RegimeReport<T>,
                        anisotropy: LimitValue<T>,
                        degenerate: Option<LimitValue<T>>| {
                rep.gamma2 = Some(gamma2);
                rep.beta2 = Some(beta2);
                rep.anisotropy = Some(anisotropy);
                rep.cap2 = Some(cap2);
                rep.degenerate_ratio = degenerate;
                rep
            };

            match c_lim {
                LimitValue::Finite(c) if c > T::zero() && c <= T::one() => {
                    let (ebc, cell) = classify_nondegenerate(
                        outer_bc,
                        DtnFamily::Anisotropic { c },
                        c,
                        sigma_mu1,
                        gamma1,
                        alpha,
                        beta1,
                        cap1,
                        "type-ii",
                    )?;
                    let rep = fill(report(ebc, cell), c_lim, None);
                    rep.ebc.validate()?;
                    Ok(rep)
                }
                LimitValue::Zero => {
                    // Degenerate branch: requires delta^2 mu1 / mu2 -> 0.
                    let ratio = scaling
                        .mu1
                        .div(&scaling.mu2)
                        .times_delta_pow(T::of(2.0))
                        .limit();
                    if !ratio.is_zero() {
                        return Err(Error::HypothesisViolated(format!(
                            "anisotropy ratio tends to zero but delta^2 * mu1 / mu2 -> {} (must be 0)",
                            ratio.describe()
                        )));
                    }
                    let (ebc, cell) = classify_degenerate(
                        outer_bc, sigma_mu1, gamma1, alpha, beta1, cap1, sigma_mu2, gamma2, beta2,
                        cap2,
                    )?;
                    let rep = fill(report(ebc, cell), c_lim, Some(ratio));
                    rep.ebc.validate()?;
                    Ok(rep)
                }
                _ => Err(Error::UnsupportedRegime(format!(
                    "anisotropy ratio mu2/mu1 -> {} lies outside [0, 1]",
                    c_lim.describe()
                ))),
            }
        }
    }
}

/// Shared 3x3 classification for Type I and Type II with `c in (0, 1]`.
#[allow(clippy::too_many_arguments)]
fn classify_nondegenerate<T: Real>(
    outer_bc: OuterBc,
    family: DtnFamily<T>,
    c: T,
    sigma_mu: LimitValue<T>,
    gamma: LimitValue<T>,
    alpha: LimitValue<T>,
    beta: LimitValue<T>,
    cap: LimitValue<T>,
    label: &str,
) -> Result<(EbcKind<T>, String)> {
    let cell = |row: &str, col: &str| {
        format!(
            "{label} {}: {row}; {col}",
            match outer_bc {
                OuterBc::Dirichlet => "dirichlet",
                OuterBc::Neumann => "neumann",
            }
        )
    };
    match outer_bc {
        OuterBc::Dirichlet => match (sigma_mu, alpha) {
            (LimitValue::Zero, LimitValue::Zero) => Ok((
                EbcKind::NeumannZero,
                cell("sigma*mu1 -> 0", "sigma/delta -> 0"),
            )),
            (LimitValue::Zero, LimitValue::Finite(a)) => Ok((
                EbcKind::Robin { alpha: a },
                cell("sigma*mu1 -> 0", "sigma/delta -> alpha"),
            )),
            (LimitValue::Zero, LimitValue::Infinity) => Ok((
                EbcKind::DirichletZero,
                cell("sigma*mu1 -> 0", "sigma/delta -> inf"),
            )),
            (LimitValue::Finite(_), LimitValue::Zero) => Ok((
                EbcKind::Dtn {
                    family,
                    variant: CapVariant::Dirichlet,
                    gamma: gamma.finite().expect("finite with sigma*mu finite"),
                    cap: Cap::Infinite,
                },
                cell("sqrt(sigma*mu1) -> gamma1", "sigma/delta -> 0"),
            )),
            (LimitValue::Finite(_), LimitValue::Finite(_)) => Ok((
                EbcKind::Dtn {
                    family,
                    variant: CapVariant::Dirichlet,
                    gamma: gamma.finite().expect("finite with sigma*mu finite"),
                    cap: cap.as_cap()?,
                },
                cell("sqrt(sigma*mu1) -> gamma1", "sigma/delta -> alpha"),
            )),
            (LimitValue::Finite(_), LimitValue::Infinity) => Ok((
                EbcKind::DirichletZero,
                cell("sqrt(sigma*mu1) -> gamma1", "sigma/delta -> inf"),
            )),
            (LimitValue::Infinity, LimitValue::Zero) => Ok((
                EbcKind::ConstantTrace {
                    flux: TraceFlux::ZeroFlux,
                },
                cell("sigma*mu1 -> inf", "sigma/delta -> 0"),
            )),
            (LimitValue::Infinity, LimitValue::Finite(a)) => Ok((
                EbcKind::ConstantTrace {
                    flux: TraceFlux::RobinIntegral { alpha: a },
                },
                cell("sigma*mu1 -> inf", "sigma/delta -> alpha"),
            )),
            (LimitValue::Infinity, LimitValue::Infinity) => Ok((
                EbcKind::DirichletZero,
                cell("sigma*mu1 -> inf", "sigma/delta -> inf"),
            )),
        },
        OuterBc::Neumann => match (sigma_mu, beta) {
            (LimitValue::Zero, col) => Ok((
                EbcKind::NeumannZero,
                cell(
                    "sigma*mu1 -> 0",
                    match col {
                        LimitValue::Zero => "mu1*delta -> 0",
                        LimitValue::Finite(_) => "mu1*delta -> beta1",
                        LimitValue::Infinity => "mu1*delta -> inf",
                    },
                ),
            )),
            (LimitValue::Finite(_), LimitValue::Zero) => Ok((
                EbcKind::NeumannZero,
                cell("sqrt(sigma*mu1) -> gamma1", "mu1*delta -> 0"),
            )),
            (LimitValue::Finite(_), LimitValue::Finite(_)) => Ok((
                EbcKind::Dtn {
                    family,
                    variant: CapVariant::Neumann,
                    gamma: gamma.finite().expect("finite with sigma*mu finite"),
                    cap: cap.as_cap()?,
                },
                cell("sqrt(sigma*mu1) -> gamma1", "mu1*delta -> beta1"),
            )),
            (LimitValue::Finite(_), LimitValue::Infinity) => Ok((
                EbcKind::Dtn {
                    family,
                    variant: CapVariant::Neumann,
                    gamma: gamma.finite().expect("finite with sigma*mu finite"),
                    cap: Cap::Infinite,
                },
                cell("sqrt(sigma*mu1) -> gamma1", "mu1*delta -> inf"),
            )),
            (LimitValue::Infinity, LimitValue::Zero) => Ok((
                EbcKind::NeumannZero,
                cell("sigma*mu1 -> inf", "mu1*delta -> 0"),
            )),
            (LimitValue::Infinity, LimitValue::Finite(b)) => Ok((
                EbcKind::SurfaceDiffusion { beta: b, c },
                cell("sigma*mu1 -> inf", "mu1*delta -> beta1"),
            )),
            (LimitValue::Infinity, LimitValue::Infinity) => Ok((
                EbcKind::ConstantTrace {
                    flux: TraceFlux::ZeroFlux,
                },
                cell("sigma*mu1 -> inf", "mu1*delta -> inf"),
            )),
        },
    }
}

/// Degenerate classification (`c = 0`), where the second tangential
/// direction gets its own sub-classification once the first saturates.
#[allow(clippy::too_many_arguments)]
fn classify_degenerate<T: Real>(
    outer_bc: OuterBc,
    sigma_mu1: LimitValue<T>,
    gamma1: LimitValue<T>,
    alpha: LimitValue<T>,
    beta1: LimitValue<T>,
    cap1: LimitValue<T>,
    sigma_mu2: LimitValue<T>,
    gamma2: LimitValue<T>,
    beta2: LimitValue<T>,
    cap2: LimitValue<T>,
) -> Result<(EbcKind<T>, String)> {
    let cell = |row: &str, col: &str| {
        format!(
            "type-ii(c=0) {}: {row}; {col}",
            match outer_bc {
                OuterBc::Dirichlet => "dirichlet",
                OuterBc::Neumann => "neumann",
            }
        )
    };
    match outer_bc {
        OuterBc::Dirichlet => {
            // Columns by sigma/delta throughout.
            let col = match alpha {
                LimitValue::Zero => "sigma/delta -> 0",
                LimitValue::Finite(_) => "sigma/delta -> alpha",
                LimitValue::Infinity => "sigma/delta -> inf",
            };
            match sigma_mu1 {
                LimitValue::Zero => match alpha {
                    LimitValue::Zero => Ok((EbcKind::NeumannZero, cell("sigma*mu1 -> 0", col))),
                    LimitValue::Finite(a) => {
                        Ok((EbcKind::Robin { alpha: a }, cell("sigma*mu1 -> 0", col)))
                    }
                    LimitValue::Infinity => {
                        Ok((EbcKind::DirichletZero, cell("sigma*mu1 -> 0", col)))
                    }
                },
                LimitValue::Finite(_) => match alpha {
                    LimitValue::Infinity => Ok((
                        EbcKind::DirichletZero,
                        cell("sqrt(sigma*mu1) -> gamma1", col),
                    )),
                    _ => Ok((
                        EbcKind::Dtn {
                            family: DtnFamily::AxisS1,
                            variant: CapVariant::Dirichlet,
                            gamma: gamma1.finite().expect("finite with sigma*mu1 finite"),
                            cap: cap1.as_cap()?,
                        },
                        cell("sqrt(sigma*mu1) -> gamma1", col),
                    )),
                },
                LimitValue::Infinity => {
                    if matches!(alpha, LimitValue::Infinity) {
                        return Ok((EbcKind::DirichletZero, cell("sigma*mu1 -> inf", col)));
                    }
                    match sigma_mu2 {
                        LimitValue::Zero => match alpha {
                            LimitValue::Zero => Ok((
                                EbcKind::ConstantInS1 {
                                    flux: S1Flux::ZeroFlux,
                                },
                                cell("sigma*mu1 -> inf, sigma*mu2 -> 0", col),
                            )),
                            LimitValue::Finite(a) => Ok((
                                EbcKind::ConstantInS1 {
                                    flux: S1Flux::RobinIntegral { alpha: a },
                                },
                                cell("sigma*mu1 -> inf, sigma*mu2 -> 0", col),
                            )),
                            LimitValue::Infinity => unreachable!("handled above"),
                        },
                        LimitValue::Finite(_) => Ok((
                            EbcKind::ConstantInS1 {
                                flux: S1Flux::Dtn {
                                    variant: CapVariant::Dirichlet,
                                    gamma: gamma2.finite().expect("finite with sigma*mu2 finite"),
                                    cap: cap2.as_cap()?,
                                },
                            },
                            cell("sigma*mu1 -> inf, sqrt(sigma*mu2) -> gamma2", col),
                        )),
                        // Transcribed as printed: the integral law carries no
                        // Robin term even in the sigma/delta -> alpha column.
                        LimitValue::Infinity => Ok((
                            EbcKind::ConstantTrace {
                                flux: TraceFlux::ZeroFlux,
                            },
                            cell("sigma*mu1 -> inf, sigma*mu2 -> inf", col),
                        )),
                    }
                }
            }
        }
        OuterBc::Neumann => {
            let col1 = match beta1 {
                LimitValue::Zero => "mu1*delta -> 0",
                LimitValue::Finite(_) => "mu1*delta -> beta1",
                LimitValue::Infinity => "mu1*delta -> inf",
            };
            match sigma_mu1 {
                LimitValue::Zero => Ok((EbcKind::NeumannZero, cell("sigma*mu1 -> 0", col1))),
                LimitValue::Finite(_) => match beta1 {
                    LimitValue::Zero => Ok((
                        EbcKind::NeumannZero,
                        cell("sqrt(sigma*mu1) -> gamma1", col1),
                    )),
                    _ => Ok((
                        EbcKind::Dtn {
                            family: DtnFamily::AxisS1,
                            variant: CapVariant::Neumann,
                            gamma: gamma1.finite().expect("finite with sigma*mu1 finite"),
                            cap: cap1.as_cap()?,
                        },
                        cell("sqrt(sigma*mu1) -> gamma1", col1),
                    )),
                },
                LimitValue::Infinity => match beta1 {
                    LimitValue::Zero => Ok((EbcKind::NeumannZero, cell("sigma*mu1 -> inf", col1))),
                    LimitValue::Finite(b1) => Ok((
                        EbcKind::SurfaceDiffusion {
                            beta: b1,
                            c: T::zero(),
                        },
                        cell("sigma*mu1 -> inf", col1),
                    )),
                    LimitValue::Infinity => {
                        // Sub-classification in the second tangential
                        // direction.
                        let col2 = match beta2 {
                            LimitValue::Zero => "mu2*delta -> 0",
                            LimitValue::Finite(_) => "mu2*delta -> beta2",
                            LimitValue::Infinity => "mu2*delta -> inf",
                        };
                        let row2 = match sigma_mu2 {
                            LimitValue::Zero => "sigma*mu2 -> 0",
                            LimitValue::Finite(_) => "sqrt(sigma*mu2) -> gamma2",
                            LimitValue::Infinity => "sigma*mu2 -> inf",
                        };
                        let sub = |row: &str, col: &str| {
                            format!(
                                "type-ii(c=0) neumann: sigma*mu1 -> inf, mu1*delta -> inf, {row}; {col}"
                            )
                        };
                        let zero_flux = EbcKind::ConstantInS1 {
                            flux: S1Flux::ZeroFlux,
                        };
                        match (sigma_mu2, beta2) {
                            (LimitValue::Zero, _) => Ok((zero_flux, sub(row2, col2))),
                            (LimitValue::Finite(_), LimitValue::Zero) => {
                                Ok((zero_flux, sub(row2, col2)))
                            }
                            (LimitValue::Finite(_), _) => Ok((
                                EbcKind::ConstantInS1 {
                                    flux: S1Flux::Dtn {
                                        variant: CapVariant::Neumann,
                                        gamma: gamma2
                                            .finite()
                                            .expect("finite with sigma*mu2 finite"),
                                        cap: cap2.as_cap()?,
                                    },
                                },
                                sub(row2, col2),
                            )),
                            (LimitValue::Infinity, LimitValue::Zero) => {
                                Ok((zero_flux, sub(row2, col2)))
                            }
                            (LimitValue::Infinity, LimitValue::Finite(b2)) => Ok((
                                EbcKind::ConstantInS1 {
                                    flux: S1Flux::SurfaceDiffusion { beta: b2 },
                                },
                                sub(row2, col2),
                            )),
                            (LimitValue::Infinity, LimitValue::Infinity) => Ok((
                                EbcKind::ConstantTrace {
                                    flux: TraceFlux::ZeroFlux,
                                },
                                sub(row2, col2),
                            )),
                        }
                    }
                },
            }
        }
    }
}
