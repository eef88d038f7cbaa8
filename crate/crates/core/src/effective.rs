//! The effective model: heat flow on the bulk alone, the coating replaced
//! by a boundary condition on the interface.
//!
//! In the Fourier basis every condition — including the nonlocal ones —
//! reduces per mode to Dirichlet, Neumann, or a Robin closure
//! `k v_r(0) = b v(0)` with `b <= 0`. [`closure_for`] is the single place
//! that mapping lives; the Robin coefficients come straight from
//! [`crate::operators::dtn_symbol`], so the solver and the operator module
//! cannot drift apart.

use crate::data::{FieldData, SourceData, TimeFactor};
use crate::error::{Error, Result};
use crate::geometry::{ModeIndex, RadialMesh, SurfaceFunction, TorusSpec};
use crate::operators::dtn_symbol;
use crate::scaling::{EbcKind, S1Flux, TraceFlux};
use crate::stepping::{
    run, step_count, InterfaceCheck, ModeProblem, ModeSystem, Parallelism, Scheme, StepPlan,
    Trajectory,
};
use crate::Real;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Everything an effective solve needs. The geometry is the bulk slab of
/// the two-domain problem: same torus, same bulk nodes, no layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + num_traits::Zero"))]
pub struct EffectiveProblemSpec<T> {
    pub torus: TorusSpec<T>,
    /// Bulk depth `L`.
    pub bulk_depth: T,
    /// Bulk node count on `[-L, 0]`.
    pub n_bulk: usize,
    pub k: T,
    pub ebc: EbcKind<T>,
    pub u0: FieldData<T>,
    #[serde(default)]
    pub source: Option<SourceData<T>>,
    pub t_end: T,
    pub dt: T,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
}

fn default_snapshot_every() -> usize {
    1
}

impl<T: Real> EffectiveProblemSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.k > T::zero() && self.k.is_finite()) {
            return Err(Error::InvalidSpec("k must be positive".into()));
        }
        if !(self.bulk_depth > T::zero() && self.bulk_depth.is_finite()) {
            return Err(Error::InvalidSpec("bulk depth must be positive".into()));
        }
        if self.n_bulk < 3 {
            return Err(Error::InvalidSpec("need at least 3 bulk nodes".into()));
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidSpec("snapshot_every must be >= 1".into()));
        }
        self.ebc.validate()?;
        step_count(self.t_end, self.dt)?;
        self.u0.validate(&self.torus)?;
        if let Some(src) = &self.source {
            src.validate(&self.torus)?;
        }
        Ok(())
    }

    pub fn mesh(&self) -> RadialMesh<T> {
        RadialMesh::bulk_only(self.bulk_depth, self.n_bulk)
    }
}

/// Per-mode reduction of an effective boundary condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryClosure<T> {
    /// Trace pinned to zero.
    Dirichlet,
    /// Zero boundary flux.
    Neumann,
    /// `k v_r(0) = b v(0)` with `b <= 0`.
    Robin { b: T },
}

/// The per-mode closure of an effective boundary condition.
///
/// Integral conditions over a constant (or `s1`-constant) trace reduce to a
/// scalar Robin law on the mean sector because the trace constancy makes
/// the integrand spatially constant there; all other modes get pinned.
pub fn closure_for<T: Real>(ebc: &EbcKind<T>, mode: &ModeIndex<T>) -> Result<BoundaryClosure<T>> {
    let robin = |b: T| -> Result<BoundaryClosure<T>> {
        if b > T::zero() {
            return Err(Error::InvalidSpec(format!(
                "closure coefficient {b} is not dissipative"
            )));
        }
        Ok(BoundaryClosure::Robin { b })
    };
    match ebc {
        EbcKind::DirichletZero => Ok(BoundaryClosure::Dirichlet),
        EbcKind::NeumannZero => Ok(BoundaryClosure::Neumann),
        EbcKind::Robin { alpha } => robin(-*alpha),
        EbcKind::Dtn {
            family,
            variant,
            gamma,
            cap,
        } => {
            let lambda_eff = match family {
                crate::scaling::DtnFamily::Isotropic => mode.lambda,
                crate::scaling::DtnFamily::Anisotropic { c } => mode.lambda_aniso(*c),
                crate::scaling::DtnFamily::AxisS1 => mode.k1 * mode.k1,
            };
            robin(*gamma * dtn_symbol(*variant, lambda_eff, *cap)?)
        }
        EbcKind::SurfaceDiffusion { beta, c } => robin(-*beta * mode.lambda_aniso(*c)),
        EbcKind::ConstantTrace { flux } => {
            if mode.is_mean() {
                match flux {
                    TraceFlux::ZeroFlux => Ok(BoundaryClosure::Neumann),
                    TraceFlux::RobinIntegral { alpha } => robin(-*alpha),
                }
            } else {
                Ok(BoundaryClosure::Dirichlet)
            }
        }
        EbcKind::ConstantInS1 { flux } => {
            if mode.m != 0 {
                return Ok(BoundaryClosure::Dirichlet);
            }
            match flux {
                S1Flux::ZeroFlux => Ok(BoundaryClosure::Neumann),
                S1Flux::RobinIntegral { alpha } => robin(-*alpha),
                S1Flux::Dtn {
                    variant,
                    gamma,
                    cap,
                } => robin(*gamma * dtn_symbol(*variant, mode.k2 * mode.k2, *cap)?),
                S1Flux::SurfaceDiffusion { beta } => robin(-*beta * mode.k2 * mode.k2),
            }
        }
    }
}

/// Assemble one mode's bulk system with its boundary closure at `r = 0`.
pub fn assemble_effective_mode_system<T: Real>(
    mode: &ModeIndex<T>,
    spec: &EffectiveProblemSpec<T>,
    mesh: &RadialMesh<T>,
) -> Result<ModeSystem<T>> {
    let closure = closure_for(&spec.ebc, mode)?;
    let n = mesh.len();
    let half = T::of(0.5);
    let lam = mode.lambda;
    let spacing = |i: usize| mesh.nodes[i + 1] - mesh.nodes[i];

    let pinned_last = matches!(closure, BoundaryClosure::Dirichlet);
    let unknowns = if pinned_last { n - 1 } else { n };

    let mut sub = vec![T::zero(); unknowns];
    let mut diag = vec![T::zero(); unknowns];
    let mut sup = vec![T::zero(); unknowns];
    let mut mass = vec![T::zero(); unknowns];
    for i in 0..unknowns {
        let mut d = T::zero();
        let mut v = T::zero();
        if i > 0 {
            let w = spec.k / spacing(i - 1);
            sub[i] = -w;
            d = d + w + spec.k * lam * spacing(i - 1) * half;
            v = v + spacing(i - 1) * half;
        }
        if i + 1 < n {
            let w = spec.k / spacing(i);
            d = d + w + spec.k * lam * spacing(i) * half;
            v = v + spacing(i) * half;
            if i + 1 < unknowns {
                sup[i] = -w;
            }
        }
        diag[i] = d;
        mass[i] = v;
    }

    let robin_b = match closure {
        BoundaryClosure::Dirichlet => None,
        BoundaryClosure::Neumann => Some(T::zero()),
        BoundaryClosure::Robin { b } => Some(b),
    };
    let mut check = None;
    if let Some(b) = robin_b {
        let last = n - 1;
        // boundary flux k v_r = b v leaves the half-cell balance
        diag[last] = diag[last] - b;
        let h = spacing(last - 1);
        check = Some(InterfaceCheck {
            idx: last,
            left_coeff: spec.k / h,
            right_coeff: None,
            robin_b: b,
            vol_left: h * half,
            vol_right: T::zero(),
            reaction_left: spec.k * lam * h * half,
            reaction_right: T::zero(),
        });
    }

    Ok(ModeSystem {
        sub,
        diag,
        sup,
        mass,
        pinned_last,
        check,
    })
}

/// Solve the effective model.
pub fn solve_effective<T: Real>(
    spec: &EffectiveProblemSpec<T>,
    parallelism: Parallelism,
) -> Result<Trajectory<T>> {
    spec.validate()?;
    let mesh = Arc::new(spec.mesh());
    let plan = StepPlan {
        scheme: spec.scheme,
        dt: spec.dt,
        n_steps: step_count(spec.t_end, spec.dt)?,
        snapshot_every: spec.snapshot_every,
        time_factor: spec
            .source
            .as_ref()
            .map(|s| s.time)
            .unwrap_or(TimeFactor::One),
    };
    let u0 = spec.u0.instantiate(spec.torus, mesh.clone())?;
    let source = match &spec.source {
        Some(src) => Some(src.spatial_part(spec.torus, mesh.clone())?),
        None => None,
    };
    let problems: Vec<ModeProblem<T>> = spec
        .torus
        .modes()
        .iter()
        .enumerate()
        .map(|(idx, mode)| {
            Ok(ModeProblem {
                system: assemble_effective_mode_system(mode, spec, &mesh)?,
                initial: u0.mode_profile(idx).to_vec(),
                source: source.as_ref().map(|f| f.mode_profile(idx).to_vec()),
            })
        })
        .collect::<Result<_>>()?;
    run(spec.torus, mesh, &problems, &plan, parallelism)
}

/// Energy bookkeeping of an effective trajectory (same quantities as the
/// two-domain report, over the bulk alone).
pub fn energy_report<T: Real>(
    traj: &Trajectory<T>,
    spec: &EffectiveProblemSpec<T>,
) -> Result<crate::full::EnergyReport<T>> {
    if traj.mesh.len() != spec.n_bulk {
        return Err(Error::TrajectoryMismatch(
            "trajectory mesh does not match the problem grid".into(),
        ));
    }
    let mesh = spec.mesh();
    let systems: Vec<ModeSystem<T>> = spec
        .torus
        .modes()
        .iter()
        .map(|mode| assemble_effective_mode_system(mode, spec, &mesh))
        .collect::<Result<_>>()?;
    Ok(crate::full::energy_from_systems(
        traj,
        &systems,
        spec.source.is_none(),
    ))
}

/// Interface traces of an effective trajectory, with the constrained-mode
/// checks already applied.
#[derive(Debug, Clone)]
pub struct TraceReport<T> {
    pub stamps: Vec<T>,
    pub traces: Vec<SurfaceFunction<T>>,
    /// Largest trace magnitude seen on a mode the closure pins to zero.
    pub max_pinned_trace: T,
    /// Largest per-step boundary flux-identity residual of the solve.
    pub max_closure_residual: T,
}

/// Extract the per-stamp traces and verify the trace constraints of the
/// condition that produced the trajectory.
pub fn trace_report<T: Real>(traj: &Trajectory<T>, ebc: &EbcKind<T>) -> Result<TraceReport<T>> {
    let modes = traj.torus.modes();
    let tol = T::of(1e-10);
    let mut max_pinned = T::zero();
    let mut traces = Vec::with_capacity(traj.fields.len());
    for field in &traj.fields {
        let trace = field.trace();
        for (idx, mode) in modes.iter().enumerate() {
            let pinned = matches!(closure_for(ebc, mode)?, BoundaryClosure::Dirichlet);
            if pinned && field.time > T::zero() {
                max_pinned = max_pinned.max(trace.coeffs[idx].norm());
            }
        }
        traces.push(trace);
    }
    if max_pinned > tol {
        return Err(Error::InvariantViolation(format!(
            "constrained trace mode reached magnitude {max_pinned}"
        )));
    }
    Ok(TraceReport {
        stamps: traj.stamps.clone(),
        traces,
        max_pinned_trace: max_pinned,
        max_closure_residual: traj.diagnostics.max_interface_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ModeEntry, RadialProfile};
    use crate::geometry::norm_l2_bulk;
    use crate::operators::{Cap, CapVariant};
    use crate::scaling::DtnFamily;
    use num_complex::Complex;

    fn torus() -> TorusSpec<f64> {
        TorusSpec::square_2pi(2, 2)
    }

    fn base_spec(ebc: EbcKind<f64>) -> EffectiveProblemSpec<f64> {
        EffectiveProblemSpec {
            torus: torus(),
            bulk_depth: 1.0,
            n_bulk: 33,
            k: 1.0,
            ebc,
            u0: FieldData {
                entries: vec![
                    ModeEntry {
                        m: 0,
                        n: 0,
                        cos: 1.0,
                        sin: 0.0,
                        profile: RadialProfile::Gaussian {
                            center: 0.0,
                            width: 0.25,
                            amplitude: 1.0,
                        },
                    },
                    ModeEntry {
                        m: 1,
                        n: 0,
                        cos: 0.5,
                        sin: 0.1,
                        profile: RadialProfile::Gaussian {
                            center: -0.3,
                            width: 0.2,
                            amplitude: 1.0,
                        },
                    },
                    ModeEntry {
                        m: 0,
                        n: 2,
                        cos: 0.3,
                        sin: 0.0,
                        profile: RadialProfile::Constant { a: 0.4 },
                    },
                ],
            },
            source: None,
            t_end: 0.1,
            dt: 0.005,
            scheme: Scheme::ImplicitEuler,
            snapshot_every: 1,
        }
    }

    fn mode(m: i64, n: i64) -> ModeIndex<f64> {
        let t = torus();
        ModeIndex::new(m, n, t.l1, t.l2)
    }

    #[test]
    fn closure_examples() {
        // beta Lap_Gamma with lambda = 4: b = -4
        let sd = EbcKind::SurfaceDiffusion { beta: 1.0, c: 1.0 };
        assert_eq!(
            closure_for(&sd, &mode(2, 0)).unwrap(),
            BoundaryClosure::Robin { b: -4.0 }
        );
        // constant trace: mean mode free, others pinned
        let ct = EbcKind::ConstantTrace {
            flux: TraceFlux::ZeroFlux,
        };
        assert_eq!(
            closure_for(&ct, &mode(0, 0)).unwrap(),
            BoundaryClosure::Neumann
        );
        assert_eq!(
            closure_for(&ct, &mode(1, 0)).unwrap(),
            BoundaryClosure::Dirichlet
        );
        // fractional operator with gamma = 2 on lambda = 9: b = -6
        let dtn = EbcKind::Dtn {
            family: DtnFamily::Isotropic,
            variant: CapVariant::Dirichlet,
            gamma: 2.0,
            cap: Cap::Infinite,
        };
        assert_eq!(
            closure_for(&dtn, &mode(3, 0)).unwrap(),
            BoundaryClosure::Robin { b: -6.0 }
        );
        // s1-constant trace with s2 surface diffusion: mode (0, 2) has b = -12
        let s1 = EbcKind::ConstantInS1 {
            flux: S1Flux::SurfaceDiffusion { beta: 3.0 },
        };
        assert_eq!(
            closure_for(&s1, &mode(0, 2)).unwrap(),
            BoundaryClosure::Robin { b: -12.0 }
        );
        assert_eq!(
            closure_for(&s1, &mode(1, 2)).unwrap(),
            BoundaryClosure::Dirichlet
        );
    }

    #[test]
    fn closures_match_operator_symbols() {
        // one source of truth: the Robin coefficient equals gamma times the
        // operator symbol for every nonlocal condition and mode
        let kinds: Vec<(EbcKind<f64>, fn(&ModeIndex<f64>) -> f64)> = vec![
            (
                EbcKind::Dtn {
                    family: DtnFamily::Isotropic,
                    variant: CapVariant::Neumann,
                    gamma: 1.7,
                    cap: Cap::Finite(0.8),
                },
                |m| m.lambda,
            ),
            (
                EbcKind::Dtn {
                    family: DtnFamily::Anisotropic { c: 0.5 },
                    variant: CapVariant::Dirichlet,
                    gamma: 2.5,
                    cap: Cap::Finite(1.5),
                },
                |m| m.lambda_aniso(0.5),
            ),
            (
                EbcKind::Dtn {
                    family: DtnFamily::AxisS1,
                    variant: CapVariant::Dirichlet,
                    gamma: 0.9,
                    cap: Cap::Infinite,
                },
                |m| m.k1 * m.k1,
            ),
        ];
        for (ebc, lambda_of) in kinds {
            let (gamma, variant, cap) = match ebc {
                EbcKind::Dtn {
                    gamma,
                    variant,
                    cap,
                    ..
                } => (gamma, variant, cap),
                _ => unreachable!(),
            };
            for mode in torus().modes() {
                let got = closure_for(&ebc, &mode).unwrap();
                let want = gamma * dtn_symbol(variant, lambda_of(&mode), cap).unwrap();
                assert_eq!(got, BoundaryClosure::Robin { b: want });
            }
        }
    }

    #[test]
    fn zero_data_zero_trajectory() {
        let mut spec = base_spec(EbcKind::Robin { alpha: 1.0 });
        spec.u0 = FieldData { entries: vec![] };
        let traj = solve_effective(&spec, Parallelism::Serial).unwrap();
        for field in &traj.fields {
            for mode in 0..spec.torus.mode_count() {
                for node in 0..field.n_nodes() {
                    assert_eq!(field.coeff(mode, node), Complex::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn neumann_zero_preserves_constants() {
        let mut spec = base_spec(EbcKind::NeumannZero);
        spec.u0 = FieldData {
            entries: vec![ModeEntry {
                m: 0,
                n: 0,
                cos: 2.0,
                sin: 0.0,
                profile: RadialProfile::Constant { a: 1.0 },
            }],
        };
        let traj = solve_effective(&spec, Parallelism::Serial).unwrap();
        let mean = spec.torus.mode_position(0, 0).unwrap();
        let want = 2.0 * spec.torus.area().sqrt();
        for field in &traj.fields {
            for node in 0..field.n_nodes() {
                assert!((field.coeff(mean, node).re - want).abs() < 1e-12 * want);
            }
        }
    }

    #[test]
    fn huge_robin_coefficient_approaches_dirichlet() {
        let robin = base_spec(EbcKind::Robin { alpha: 1e6 });
        let dirichlet = base_spec(EbcKind::DirichletZero);
        let tr = solve_effective(&robin, Parallelism::Serial).unwrap();
        let td = solve_effective(&dirichlet, Parallelism::Serial).unwrap();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (a, b) in tr.fields.iter().zip(&td.fields) {
            let mut diff = a.clone();
            for mode in 0..robin.torus.mode_count() {
                for node in 0..a.n_nodes() {
                    diff.set_coeff(mode, node, a.coeff(mode, node) - b.coeff(mode, node));
                }
            }
            worst = worst.max(norm_l2_bulk(&diff));
            scale = scale.max(norm_l2_bulk(b));
        }
        assert!(worst <= 1e-3 * scale, "penalty gap {worst} vs {scale}");
    }

    #[test]
    fn every_condition_is_dissipative() {
        let kinds: Vec<EbcKind<f64>> = vec![
            EbcKind::DirichletZero,
            EbcKind::NeumannZero,
            EbcKind::Robin { alpha: 2.0 },
            EbcKind::Dtn {
                family: DtnFamily::Isotropic,
                variant: CapVariant::Dirichlet,
                gamma: 1.0,
                cap: Cap::Finite(1.0),
            },
            EbcKind::Dtn {
                family: DtnFamily::Anisotropic { c: 0.5 },
                variant: CapVariant::Neumann,
                gamma: 1.0,
                cap: Cap::Infinite,
            },
            EbcKind::Dtn {
                family: DtnFamily::AxisS1,
                variant: CapVariant::Dirichlet,
                gamma: 1.0,
                cap: Cap::Finite(1.0),
            },
            EbcKind::SurfaceDiffusion { beta: 1.0, c: 0.5 },
            EbcKind::ConstantTrace {
                flux: TraceFlux::RobinIntegral { alpha: 1.0 },
            },
            EbcKind::ConstantInS1 {
                flux: S1Flux::Dtn {
                    variant: CapVariant::Neumann,
                    gamma: 1.0,
                    cap: Cap::Finite(2.0),
                },
            },
            EbcKind::ConstantInS1 {
                flux: S1Flux::SurfaceDiffusion { beta: 0.5 },
            },
        ];
        for ebc in kinds {
            let spec = base_spec(ebc);
            let traj = solve_effective(&spec, Parallelism::Serial).unwrap();
            let mut prev = norm_l2_bulk(&traj.fields[0]);
            for field in &traj.fields[1..] {
                let now = norm_l2_bulk(field);
                assert!(now <= prev * (1.0 + 1e-12), "{ebc:?} grew: {now} > {prev}");
                prev = now;
            }
        }
    }

    #[test]
    fn dirichlet_cap_dissipates_more_than_neumann_cap() {
        let dtn = |variant| {
            base_spec(EbcKind::Dtn {
                family: DtnFamily::Isotropic,
                variant,
                gamma: 1.0,
                cap: Cap::Finite(1.0),
            })
        };
        let td = solve_effective(&dtn(CapVariant::Dirichlet), Parallelism::Serial).unwrap();
        let tn = solve_effective(&dtn(CapVariant::Neumann), Parallelism::Serial).unwrap();
        for (d, n) in td.fields.iter().zip(&tn.fields).skip(1) {
            assert!(norm_l2_bulk(d) <= norm_l2_bulk(n) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn trace_report_checks_constrained_modes() {
        let spec = base_spec(EbcKind::ConstantTrace {
            flux: TraceFlux::ZeroFlux,
        });
        let traj = solve_effective(&spec, Parallelism::Serial).unwrap();
        let report = trace_report(&traj, &spec.ebc).unwrap();
        assert_eq!(report.max_pinned_trace, 0.0);
        // mean mode survives on the trace
        let mean = spec.torus.mode_position(0, 0).unwrap();
        assert!(report.traces.last().unwrap().coeffs[mean].norm() > 0.0);

        // single-mode start under a mode-diagonal closure keeps the trace in
        // that mode pair
        let mut single = base_spec(EbcKind::NeumannZero);
        single.u0 = FieldData {
            entries: vec![ModeEntry {
                m: 1,
                n: 0,
                cos: 1.0,
                sin: 0.0,
                profile: RadialProfile::Constant { a: 1.0 },
            }],
        };
        let traj = solve_effective(&single, Parallelism::Serial).unwrap();
        let report = trace_report(&traj, &single.ebc).unwrap();
        let trace = report.traces.last().unwrap();
        for (idx, mode) in single.torus.modes().iter().enumerate() {
            if (mode.m, mode.n) != (1, 0) && (mode.m, mode.n) != (-1, 0) {
                assert!(trace.coeffs[idx].norm() < 1e-15);
            }
        }
    }

    #[test]
    fn closure_flux_identity_holds_per_step() {
        let spec = base_spec(EbcKind::Dtn {
            family: DtnFamily::Isotropic,
            variant: CapVariant::Dirichlet,
            gamma: 1.0,
            cap: Cap::Finite(1.0),
        });
        let traj = solve_effective(&spec, Parallelism::Serial).unwrap();
        let report = trace_report(&traj, &spec.ebc).unwrap();
        assert!(
            report.max_closure_residual < 1e-9,
            "flux identity residual {}",
            report.max_closure_residual
        );
    }

    #[test]
    fn parallel_matches_serial() {
        let spec = base_spec(EbcKind::SurfaceDiffusion { beta: 1.0, c: 1.0 });
        let a = solve_effective(&spec, Parallelism::Serial).unwrap();
        let b = solve_effective(&spec, Parallelism::Threads(4)).unwrap();
        for (fa, fb) in a.fields.iter().zip(&b.fields) {
            for mode in 0..spec.torus.mode_count() {
                for node in 0..fa.n_nodes() {
                    assert_eq!(fa.coeff(mode, node), fb.coeff(mode, node));
                }
            }
        }
    }
}

#[cfg(test)]
mod steady_state_tests {
    use super::*;
    use crate::data::FieldData;
    use crate::geometry::ModeIndex;

    /// Constant unit source against a Robin closure: the steady flux is
    /// -(r + L), the boundary row pins k u_r(0) = b u(0), and the scheme
    /// reproduces the resulting parabola exactly at the nodes.
    #[test]
    fn stationary_robin_solution_is_nodally_exact() {
        let torus = TorusSpec::square_2pi(1, 1);
        let (bulk_depth, k, b) = (1.0, 2.0, -3.0);
        let spec = EffectiveProblemSpec {
            torus,
            bulk_depth,
            n_bulk: 11,
            k,
            ebc: EbcKind::Robin { alpha: -b },
            u0: FieldData { entries: vec![] },
            source: None,
            t_end: 1.0,
            dt: 0.1,
            scheme: Scheme::ImplicitEuler,
            snapshot_every: 1,
        };
        let mesh = spec.mesh();
        let mode = ModeIndex::new(0, 0, torus.l1, torus.l2);
        let system = assemble_effective_mode_system(&mode, &spec, &mesh).unwrap();
        let mut rhs: Vec<f64> = system.mass.clone();
        system.stiffness().solve(&mut rhs);

        // u(0) = flux(0)/b with flux(0) = -L; integrate u' = flux/k inward
        let exact = |r: f64| {
            let u0 = -bulk_depth / b;
            u0 + (bulk_depth * bulk_depth - (r + bulk_depth) * (r + bulk_depth)) / (2.0 * k)
        };
        for (i, got) in rhs.iter().enumerate() {
            let want = exact(mesh.nodes[i]);
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                "node {i}: {got} vs {want}"
            );
        }
    }
}
