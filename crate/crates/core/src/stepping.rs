//! Shared per-mode time stepping for the two-domain and effective solvers.
//!
//! Both solvers reduce to one real tridiagonal system per Fourier mode,
//! stepped implicitly with a complex state vector. The machinery here is
//! solver-agnostic: it owns the mass/stiffness pairs, the implicit-Euler and
//! trapezoidal updates, snapshot collection, and the per-step interface
//! residual bookkeeping. Modes are independent, so they may be advanced in
//! any order or in parallel with bit-identical results; the trajectory is
//! always assembled in the fixed lexicographic mode order.

use crate::data::TimeFactor;
use crate::error::{Error, Result};
use crate::geometry::{RadialMesh, SpectralField, TorusSpec};
use crate::tridiag::Tridiag;
use crate::Real;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Time integration scheme. Implicit Euler is the default: it is
/// unconditionally stable and exactly dissipative on these systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    ImplicitEuler,
    Trapezoidal,
}

impl Scheme {
    /// Weight of the new state in the implicit update.
    fn theta<T: Real>(self) -> T {
        match self {
            Scheme::ImplicitEuler => T::one(),
            Scheme::Trapezoidal => T::of(0.5),
        }
    }
}

/// How to distribute mode solves across threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Serial,
    Threads(usize),
}

/// Data for the per-step flux-consistency check at the interface node.
///
/// The two half-cell balances around the interface each determine the flux
/// through `r = 0`; their difference is identically the row residual of the
/// solved system, so tracking it guards the assembly (reaction splitting,
/// conductivity sides) rather than the linear algebra.
#[derive(Debug, Clone, Copy)]
pub struct InterfaceCheck<T> {
    /// Physical node index of the interface.
    pub idx: usize,
    /// `k / h` on the bulk side of the interface.
    pub left_coeff: T,
    /// `sigma / h` on the layer side; `None` when the interface is a
    /// boundary row closed by a Robin coefficient instead.
    pub right_coeff: Option<T>,
    /// Boundary closure coefficient `b` (`k v_r = b v`); zero for a plain
    /// zero-flux row. Ignored when `right_coeff` is set.
    pub robin_b: T,
    /// Bulk-side half-cell volume.
    pub vol_left: T,
    /// Layer-side half-cell volume (zero for boundary rows).
    pub vol_right: T,
    /// Reaction mass on the bulk half cell.
    pub reaction_left: T,
    /// Reaction mass on the layer half cell.
    pub reaction_right: T,
}

/// One mode's assembled spatial operator: stiffness `A`, lumped mass `V`,
/// and boundary bookkeeping.
///
/// The quadratic form of `A` is the discrete Dirichlet energy
/// `sum K |du|^2 / h + sum R |u|^2`, so `A` is symmetric positive
/// semidefinite and the implicit updates are unconditionally dissipative in
/// the `V`-weighted norm.
#[derive(Debug, Clone)]
pub struct ModeSystem<T> {
    pub sub: Vec<T>,
    pub diag: Vec<T>,
    pub sup: Vec<T>,
    /// Control volumes of the unknown nodes.
    pub mass: Vec<T>,
    /// Whether one trailing physical node is pinned to zero (Dirichlet) and
    /// eliminated from the unknowns.
    pub pinned_last: bool,
    pub check: Option<InterfaceCheck<T>>,
}

impl<T: Real> ModeSystem<T> {
    pub fn unknowns(&self) -> usize {
        self.diag.len()
    }

    pub fn physical_len(&self) -> usize {
        self.unknowns() + usize::from(self.pinned_last)
    }

    /// Factor the bare stiffness; panics for singular systems (the
    /// zero-mode pure-Neumann operator).
    pub fn stiffness(&self) -> Tridiag<T> {
        Tridiag::factor(self.sub.clone(), self.diag.clone(), self.sup.clone())
    }

    /// Flux-part row sums: zero for interior rows of a conservative stencil
    /// when the reaction vanishes.
    pub fn row_sums(&self) -> Vec<T> {
        let n = self.unknowns();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i];
                if i > 0 {
                    s = s + self.sub[i];
                }
                if i + 1 < n {
                    s = s + self.sup[i];
                }
                s
            })
            .collect()
    }

    /// Discrete energy `Re <x, A x>` of a physical profile.
    pub fn energy(&self, physical: &[Complex<T>]) -> T {
        let n = self.unknowns();
        debug_assert_eq!(physical.len(), self.physical_len());
        let x = &physical[..n];
        let ax = self.mul_complex(x);
        x.iter()
            .zip(&ax)
            .fold(T::zero(), |acc, (xi, axi)| acc + (xi.conj() * axi).re)
    }

    fn mul_complex(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.unknowns();
        (0..n)
            .map(|i| {
                let mut y = cscale(x[i], self.diag[i]);
                if i > 0 {
                    y = y + cscale(x[i - 1], self.sub[i]);
                }
                if i + 1 < n {
                    y = y + cscale(x[i + 1], self.sup[i]);
                }
                y
            })
            .collect()
    }

    fn implicit_lhs(&self, scheme: Scheme, dt: T) -> Tridiag<T> {
        let theta: T = scheme.theta();
        let n = self.unknowns();
        let mut sub = vec![T::zero(); n];
        let mut diag = vec![T::zero(); n];
        let mut sup = vec![T::zero(); n];
        for i in 0..n {
            sub[i] = theta * self.sub[i];
            sup[i] = theta * self.sup[i];
            diag[i] = self.mass[i] / dt + theta * self.diag[i];
        }
        Tridiag::factor(sub, diag, sup)
    }
}

fn cscale<T: Real>(z: Complex<T>, a: T) -> Complex<T> {
    Complex::new(z.re * a, z.im * a)
}

/// One mode's full stepping problem.
#[derive(Debug, Clone)]
pub struct ModeProblem<T> {
    pub system: ModeSystem<T>,
    /// Initial profile on the physical nodes.
    pub initial: Vec<Complex<T>>,
    /// Spatial source profile on the physical nodes, scaled per step by the
    /// plan's time factor.
    pub source: Option<Vec<Complex<T>>>,
}

/// Stepping parameters shared by every mode of a solve.
#[derive(Debug, Clone, Copy)]
pub struct StepPlan<T> {
    pub scheme: Scheme,
    pub dt: T,
    pub n_steps: usize,
    /// Keep every `snapshot_every`-th step (plus step 0 and the final one).
    pub snapshot_every: usize,
    pub time_factor: TimeFactor<T>,
}

impl<T: Real> StepPlan<T> {
    /// Step indices that are stored in the trajectory.
    pub fn snapshot_steps(&self) -> Vec<usize> {
        let every = self.snapshot_every.max(1);
        let mut steps: Vec<usize> = (0..=self.n_steps).filter(|j| j % every == 0).collect();
        if *steps.last().expect("step 0 always kept") != self.n_steps {
            steps.push(self.n_steps);
        }
        steps
    }
}

/// Per-solve diagnostics accumulated while stepping.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Diagnostics<T> {
    pub n_steps: usize,
    /// Largest relative interface residual seen at any mode and step:
    /// the two-sided flux jump for the two-domain solver, the boundary
    /// closure residual for the effective solver.
    pub max_interface_residual: T,
}

/// Ordered time stamps with one spectral field per stamp.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub torus: TorusSpec<T>,
    pub mesh: Arc<RadialMesh<T>>,
    pub scheme: Scheme,
    pub dt: T,
    pub stamps: Vec<T>,
    pub fields: Vec<SpectralField<T>>,
    pub diagnostics: Diagnostics<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn final_field(&self) -> &SpectralField<T> {
        self.fields.last().expect("trajectory includes t = 0")
    }
}

struct ModeOutcome<T> {
    snapshots: Vec<Vec<Complex<T>>>,
    max_residual: T,
    nonfinite_step: Option<usize>,
}

fn advance_mode<T: Real>(problem: &ModeProblem<T>, plan: &StepPlan<T>) -> ModeOutcome<T> {
    let system = &problem.system;
    let n = system.unknowns();
    let theta: T = plan.scheme.theta();
    let lhs = system.implicit_lhs(plan.scheme, plan.dt);
    let snapshot_at = plan.snapshot_steps();

    let mut state: Vec<Complex<T>> = problem.initial[..n].to_vec();
    let mut old_physical = physical(system, &state);
    let mut snapshots = Vec::with_capacity(snapshot_at.len());
    if snapshot_at[0] == 0 {
        // the stored t = 0 state is the initial datum itself; a pinned
        // boundary node takes effect from the first step on
        snapshots.push(problem.initial.clone());
    }

    let mut max_residual = T::zero();
    let mut nonfinite_step = None;
    let mut next_snapshot = if snapshot_at[0] == 0 { 1 } else { 0 };

    for j in 1..=plan.n_steps {
        let t_prev = plan.dt * T::of_usize(j - 1);
        let t_next = plan.dt * T::of_usize(j);

        // rhs = (V/dt) u + (1 - theta) (-A u) + V f_theta
        let mut rhs: Vec<Complex<T>> = (0..n)
            .map(|i| cscale(state[i], system.mass[i] / plan.dt))
            .collect();
        if matches!(plan.scheme, Scheme::Trapezoidal) {
            let au = system.mul_complex(&state);
            let w = T::one() - theta;
            for i in 0..n {
                rhs[i] = rhs[i] - cscale(au[i], w);
            }
        }
        let mut source_scale_theta = T::zero();
        if let Some(src) = &problem.source {
            let s_prev = plan.time_factor.eval(t_prev);
            let s_next = plan.time_factor.eval(t_next);
            source_scale_theta = theta * s_next + (T::one() - theta) * s_prev;
            for i in 0..n {
                rhs[i] = rhs[i] + cscale(src[i], system.mass[i] * source_scale_theta);
            }
        }
        lhs.solve_complex(&mut rhs);
        let new_state = rhs;

        if new_state
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            nonfinite_step = Some(j);
            break;
        }

        let new_physical = physical(system, &new_state);
        if let Some(check) = &system.check {
            let res = interface_residual(
                check,
                &old_physical,
                &new_physical,
                problem.source.as_deref(),
                source_scale_theta,
                plan.dt,
                theta,
            );
            max_residual = max_residual.max(res);
        }

        if next_snapshot < snapshot_at.len() && snapshot_at[next_snapshot] == j {
            snapshots.push(new_physical.clone());
            next_snapshot += 1;
        }
        state = new_state;
        old_physical = new_physical;
    }

    ModeOutcome {
        snapshots,
        max_residual,
        nonfinite_step,
    }
}

fn physical<T: Real>(system: &ModeSystem<T>, state: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out = state.to_vec();
    if system.pinned_last {
        out.push(Complex::new(T::zero(), T::zero()));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn interface_residual<T: Real>(
    check: &InterfaceCheck<T>,
    old: &[Complex<T>],
    new: &[Complex<T>],
    source: Option<&[Complex<T>]>,
    source_scale_theta: T,
    dt: T,
    theta: T,
) -> T {
    let avg = |i: usize| {
        let w = T::one() - theta;
        Complex::new(
            theta * new[i].re + w * old[i].re,
            theta * new[i].im + w * old[i].im,
        )
    };
    let idx = check.idx;
    let dudt = cscale(new[idx] - old[idx], T::one() / dt);
    let f_here = source
        .map(|s| cscale(s[idx], source_scale_theta))
        .unwrap_or_else(|| Complex::new(T::zero(), T::zero()));

    // flux through the interface implied by the bulk half cell
    let q_left = cscale(dudt, check.vol_left)
        + cscale(avg(idx) - avg(idx - 1), check.left_coeff)
        + cscale(avg(idx), check.reaction_left)
        - cscale(f_here, check.vol_left);
    // ... and by the layer half cell / the boundary closure
    let q_right = match check.right_coeff {
        Some(rc) => {
            cscale(avg(idx + 1) - avg(idx), rc)
                - cscale(dudt, check.vol_right)
                - cscale(avg(idx), check.reaction_right)
                + cscale(f_here, check.vol_right)
        }
        None => cscale(avg(idx), check.robin_b),
    };

    let jump = (q_left - q_right).norm();
    if jump == T::zero() {
        return T::zero();
    }
    let coeff = check.left_coeff + check.right_coeff.unwrap_or_else(|| check.robin_b.abs());
    let mut local = avg(idx - 1).norm().max(avg(idx).norm());
    if check.right_coeff.is_some() {
        local = local.max(avg(idx + 1).norm());
    }
    let scale = q_left.norm().max(q_right.norm()).max(coeff * local);
    jump / scale.max(T::of(1e-300))
}

/// Advance all modes and assemble the trajectory in mode order.
///
/// `problems` must be aligned with `torus.modes()`. Threads split the mode
/// list into contiguous chunks; every mode computes exactly the same
/// floating-point sequence either way, so serial and parallel runs agree
/// bitwise.
pub fn run<T: Real>(
    torus: TorusSpec<T>,
    mesh: Arc<RadialMesh<T>>,
    problems: &[ModeProblem<T>],
    plan: &StepPlan<T>,
    parallelism: Parallelism,
) -> Result<Trajectory<T>> {
    assert_eq!(problems.len(), torus.mode_count());
    let outcomes: Vec<ModeOutcome<T>> = match parallelism {
        Parallelism::Serial => problems.iter().map(|p| advance_mode(p, plan)).collect(),
        Parallelism::Threads(threads) => {
            let threads = threads.max(1).min(problems.len().max(1));
            let chunk = problems.len().div_ceil(threads);
            let mut slots: Vec<Option<ModeOutcome<T>>> = Vec::new();
            slots.resize_with(problems.len(), || None);
            std::thread::scope(|scope| {
                for (problem_chunk, slot_chunk) in
                    problems.chunks(chunk).zip(slots.chunks_mut(chunk))
                {
                    scope.spawn(move || {
                        for (problem, slot) in problem_chunk.iter().zip(slot_chunk.iter_mut()) {
                            *slot = Some(advance_mode(problem, plan));
                        }
                    });
                }
            });
            slots
                .into_iter()
                .map(|s| s.expect("all chunks ran"))
                .collect()
        }
    };

    // deterministic failure report: lowest step, then lowest mode index
    let mut failure: Option<(usize, usize)> = None;
    for (mode_idx, outcome) in outcomes.iter().enumerate() {
        if let Some(step) = outcome.nonfinite_step {
            if failure.is_none_or(|(s, _)| step < s) {
                failure = Some((step, mode_idx));
            }
        }
    }
    if let Some((step, mode_idx)) = failure {
        let mode = &torus.modes()[mode_idx];
        return Err(Error::SolverFailure {
            step,
            reason: format!("non-finite coefficients in mode ({}, {})", mode.m, mode.n),
        });
    }

    let snapshot_at = plan.snapshot_steps();
    let stamps: Vec<T> = snapshot_at
        .iter()
        .map(|j| plan.dt * T::of_usize(*j))
        .collect();
    let mut fields = Vec::with_capacity(stamps.len());
    for (s_idx, stamp) in stamps.iter().enumerate() {
        let mut field = SpectralField::zero(torus, mesh.clone(), *stamp);
        for (mode_idx, outcome) in outcomes.iter().enumerate() {
            for (node, value) in outcome.snapshots[s_idx].iter().enumerate() {
                field.set_coeff(mode_idx, node, *value);
            }
        }
        fields.push(field);
    }
    let max_interface_residual = outcomes
        .iter()
        .fold(T::zero(), |acc, o| acc.max(o.max_residual));

    Ok(Trajectory {
        torus,
        mesh,
        scheme: plan.scheme,
        dt: plan.dt,
        stamps,
        fields,
        diagnostics: Diagnostics {
            n_steps: plan.n_steps,
            max_interface_residual,
        },
    })
}

/// Validate that `t_end` is an integer number of steps of `dt` and return
/// the step count.
pub fn step_count<T: Real>(t_end: T, dt: T) -> Result<usize> {
    if !(dt > T::zero() && t_end > T::zero() && dt <= t_end) {
        return Err(Error::InvalidSpec(
            "need 0 < dt <= t_end for time stepping".into(),
        ));
    }
    let ratio = t_end / dt;
    let n = ratio.round();
    let n_f = n.to_f64().unwrap_or(f64::NAN);
    if !(n_f.is_finite() && (1.0..=1e9).contains(&n_f)) || (ratio - n).abs() > T::of(1e-8) * n {
        return Err(Error::InvalidSpec(format!(
            "t_end must be an integer multiple of dt (t_end/dt = {ratio})"
        )));
    }
    Ok(n_f as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_steps_cover_endpoints() {
        let plan = StepPlan {
            scheme: Scheme::ImplicitEuler,
            dt: 0.1f64,
            n_steps: 10,
            snapshot_every: 4,
            time_factor: TimeFactor::One,
        };
        assert_eq!(plan.snapshot_steps(), vec![0, 4, 8, 10]);
        let every_step = StepPlan {
            snapshot_every: 1,
            ..plan
        };
        assert_eq!(every_step.snapshot_steps().len(), 11);
    }

    #[test]
    fn step_count_validation() {
        assert_eq!(step_count(0.5f64, 0.00125).unwrap(), 400);
        assert_eq!(step_count(1.0f64, 0.1).unwrap(), 10);
        assert!(step_count(1.0f64, 0.3).is_err());
        assert!(step_count(1.0f64, -0.1).is_err());
        assert!(step_count(0.05f64, 0.1).is_err());
    }
}
