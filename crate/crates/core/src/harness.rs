//! Thickness sweeps: solve the two-domain problem along a decreasing list
//! of coating thicknesses, solve the effective model once, and measure how
//! fast the two agree on the bulk.

use crate::data::{FieldData, SourceData};
use crate::effective::{solve_effective, EffectiveProblemSpec};
use crate::error::{Error, Result};
use crate::fit;
use crate::full::{solve_full, FullProblemSpec};
use crate::geometry::{RadialGrid, TorusSpec};
use crate::scaling::{classify, CoatingScaling, OuterBc, RegimeReport};
use crate::stepping::{Parallelism, Scheme, Trajectory};
use crate::Real;
use serde::{Deserialize, Serialize};

/// A full convergence experiment: geometry, data, scaling, and the
/// thickness list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + num_traits::Zero"))]
pub struct ExperimentConfig<T> {
    pub torus: TorusSpec<T>,
    pub bulk_depth: T,
    pub n_bulk: usize,
    /// Layer node count, fixed as the coating shrinks.
    pub n_layer: usize,
    pub outer_bc: OuterBc,
    pub scaling: CoatingScaling<T>,
    pub k: T,
    pub u0: FieldData<T>,
    #[serde(default)]
    pub source: Option<SourceData<T>>,
    pub t_end: T,
    pub dt: T,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
    /// Strictly decreasing positive coating thicknesses.
    pub delta_list: Vec<T>,
}

fn default_snapshot_every() -> usize {
    1
}

impl<T: Real> ExperimentConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.delta_list.is_empty() {
            return Err(Error::InvalidSpec("delta_list must be nonempty".into()));
        }
        for pair in self.delta_list.windows(2) {
            if !(pair[1] < pair[0]) {
                return Err(Error::InvalidSpec(
                    "delta_list must be strictly decreasing".into(),
                ));
            }
        }
        if !(*self.delta_list.last().unwrap() > T::zero()) {
            return Err(Error::InvalidSpec("thicknesses must be positive".into()));
        }
        self.effective_spec(crate::scaling::EbcKind::NeumannZero)
            .validate()
    }

    /// The effective problem this experiment converges to; it does not
    /// depend on the thickness.
    pub fn effective_spec(&self, ebc: crate::scaling::EbcKind<T>) -> EffectiveProblemSpec<T> {
        EffectiveProblemSpec {
            torus: self.torus,
            bulk_depth: self.bulk_depth,
            n_bulk: self.n_bulk,
            k: self.k,
            ebc,
            u0: self.u0.clone(),
            source: self.source.clone(),
            t_end: self.t_end,
            dt: self.dt,
            scheme: self.scheme,
            snapshot_every: self.snapshot_every,
        }
    }

    /// The two-domain problem at one thickness.
    pub fn full_spec(&self, delta: T) -> Result<FullProblemSpec<T>> {
        Ok(FullProblemSpec {
            torus: self.torus,
            grid: RadialGrid::new(self.bulk_depth, self.n_bulk, delta, self.n_layer)?,
            k: self.k,
            sigma: self.scaling.sigma.value(delta),
            mu1: self.scaling.mu1.value(delta),
            mu2: self.scaling.mu2.value(delta),
            outer_bc: self.outer_bc,
            u0: self.u0.clone(),
            source: self.source.clone(),
            t_end: self.t_end,
            dt: self.dt,
            scheme: self.scheme,
            snapshot_every: self.snapshot_every,
        })
    }
}

/// Per-stamp and sup-in-time L2 distance between a two-domain trajectory
/// and an effective one on the shared bulk grid.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorMetric<T> {
    pub stamps: Vec<T>,
    pub per_stamp: Vec<T>,
    pub sup: T,
    pub final_err: T,
}

/// L2 error on the bulk, per stamp and sup over stamps.
///
/// Both trajectories must share the torus, the time stamps, and the bulk
/// nodes; the full one is restricted to `r <= 0`.
pub fn error_metric<T: Real>(
    full: &Trajectory<T>,
    effective: &Trajectory<T>,
) -> Result<ErrorMetric<T>> {
    if full.torus != effective.torus {
        return Err(Error::TrajectoryMismatch("torus specs differ".into()));
    }
    if full.stamps.len() != effective.stamps.len()
        || full
            .stamps
            .iter()
            .zip(&effective.stamps)
            .any(|(a, b)| a != b)
    {
        return Err(Error::TrajectoryMismatch("time stamps differ".into()));
    }
    let n_bulk = full.mesh.n_bulk;
    if effective.mesh.len() != n_bulk
        || full.mesh.nodes[..n_bulk]
            .iter()
            .zip(&effective.mesh.nodes)
            .any(|(a, b)| a != b)
    {
        return Err(Error::TrajectoryMismatch("bulk grids differ".into()));
    }

    let weights = effective.mesh.weights();
    let mode_count = full.torus.mode_count();
    let mut per_stamp = Vec::with_capacity(full.stamps.len());
    for (fu, fv) in full.fields.iter().zip(&effective.fields) {
        let mut acc = T::zero();
        for mode in 0..mode_count {
            let pu = fu.mode_profile(mode);
            let pv = fv.mode_profile(mode);
            for i in 0..n_bulk {
                acc = acc + weights[i] * (pu[i] - pv[i]).norm_sqr();
            }
        }
        per_stamp.push(acc.sqrt());
    }
    let sup = per_stamp.iter().fold(T::zero(), |a, e| a.max(*e));
    let final_err = *per_stamp.last().expect("nonempty trajectory");
    Ok(ErrorMetric {
        stamps: full.stamps.clone(),
        per_stamp,
        sup,
        final_err,
    })
}

/// One thickness of the sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow<T> {
    pub delta: T,
    pub sigma: T,
    pub mu1: T,
    pub mu2: T,
    /// Rescaled layer height `delta sqrt(mu1 / sigma)` at this thickness.
    pub h: T,
    pub error_sup_l2: T,
    pub error_final: T,
}

/// The sweep outcome: classification, per-thickness errors, and the fitted
/// decay.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport<T> {
    pub regime: RegimeReport<T>,
    #[serde(rename = "errors")]
    pub rows: Vec<SweepRow<T>>,
    /// Least-squares slope of `log error_sup` against `log delta`;
    /// informational only.
    pub slope: Option<T>,
    /// Whether the sup errors decreased strictly along the sweep; a
    /// non-monotone sequence is flagged, never hidden.
    pub monotone_decreasing: bool,
}

/// Run the whole experiment: classify, solve the effective model once,
/// sweep the thicknesses, fit the decay.
pub fn run_convergence<T: Real>(
    cfg: &ExperimentConfig<T>,
    parallelism: Parallelism,
) -> Result<ConvergenceReport<T>> {
    cfg.validate()?;
    let regime = classify(cfg.outer_bc, &cfg.scaling)?;
    let effective = solve_effective(&cfg.effective_spec(regime.ebc), parallelism)?;

    let mut rows = Vec::with_capacity(cfg.delta_list.len());
    for &delta in &cfg.delta_list {
        let spec = cfg.full_spec(delta)?;
        let full = solve_full(&spec, parallelism)?;
        let metric = error_metric(&full, &effective)?;
        rows.push(SweepRow {
            delta,
            sigma: spec.sigma,
            mu1: spec.mu1,
            mu2: spec.mu2,
            h: delta * (spec.mu1 / spec.sigma).sqrt(),
            error_sup_l2: metric.sup,
            error_final: metric.final_err,
        });
    }

    let deltas: Vec<T> = rows.iter().map(|r| r.delta).collect();
    let sups: Vec<T> = rows.iter().map(|r| r.error_sup_l2).collect();
    let slope = fit::log_log_slope(&deltas, &sups);
    let monotone_decreasing = sups.windows(2).all(|w| w[1] < w[0]);

    Ok(ConvergenceReport {
        regime,
        rows,
        slope,
        monotone_decreasing,
    })
}
