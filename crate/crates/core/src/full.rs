//! The full two-domain problem: isotropic bulk below the interface, a
//! resolved anisotropic coating above it, coupled by continuity of
//! temperature and of normal flux.
//!
//! Diagonalizing over the torus modes leaves one radial problem per mode,
//!
//! ```text
//! bulk  (r < 0):       u_t = k u_rr - k lambda u + f
//! layer (0 < r < d):   u_t = sigma u_rr - (mu1 k1^2 + mu2 k2^2) u + f
//! ```
//!
//! discretized with conservative node-centered finite volumes. The
//! interface node's control volume spans half cells on both sides, so the
//! discrete normal flux `k u_r = sigma u_r` is continuous by construction;
//! the outer boundary at `r = delta` carries the problem's Dirichlet or
//! Neumann condition and the artificial far boundary at `r = -L` is always
//! insulated.

use crate::data::{FieldData, SourceData, TimeFactor};
use crate::error::{Error, Result};
use crate::geometry::{norm_l2_full, ModeIndex, RadialGrid, RadialMesh, TorusSpec};
use crate::scaling::OuterBc;
use crate::stepping::{
    run, step_count, InterfaceCheck, ModeProblem, ModeSystem, Parallelism, Scheme, StepPlan,
    Trajectory,
};
use crate::Real;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Everything a two-domain solve needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + num_traits::Zero"))]
pub struct FullProblemSpec<T> {
    pub torus: TorusSpec<T>,
    pub grid: RadialGrid<T>,
    /// Bulk conductivity.
    pub k: T,
    /// Normal conductivity of the coating.
    pub sigma: T,
    /// Tangential conductivity along `s1`.
    pub mu1: T,
    /// Tangential conductivity along `s2`.
    pub mu2: T,
    pub outer_bc: OuterBc,
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

impl<T: Real> FullProblemSpec<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("k", self.k),
            ("sigma", self.sigma),
            ("mu1", self.mu1),
            ("mu2", self.mu2),
        ] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::InvalidSpec(format!("{name} must be positive")));
            }
        }
        step_count(self.t_end, self.dt)?;
        self.u0.validate(&self.torus)?;
        if let Some(src) = &self.source {
            src.validate(&self.torus)?;
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidSpec("snapshot_every must be >= 1".into()));
        }
        Ok(())
    }

    fn plan(&self) -> Result<StepPlan<T>> {
        Ok(StepPlan {
            scheme: self.scheme,
            dt: self.dt,
            n_steps: step_count(self.t_end, self.dt)?,
            snapshot_every: self.snapshot_every,
            time_factor: self
                .source
                .as_ref()
                .map(|s| s.time)
                .unwrap_or(TimeFactor::One),
        })
    }
}

/// Assemble the conservative finite-volume system of one mode.
pub fn assemble_mode_system<T: Real>(
    mode: &ModeIndex<T>,
    spec: &FullProblemSpec<T>,
    mesh: &RadialMesh<T>,
) -> ModeSystem<T> {
    let n = mesh.len();
    let i_face = mesh.interface;
    let half = T::of(0.5);
    let reaction_layer = spec.mu1 * mode.k1 * mode.k1 + spec.mu2 * mode.k2 * mode.k2;

    // per-interval conductivity and reaction density
    let conductivity = |i: usize| if i < i_face { spec.k } else { spec.sigma };
    let reaction = |i: usize| {
        if i < i_face {
            spec.k * mode.lambda
        } else {
            reaction_layer
        }
    };
    let spacing = |i: usize| mesh.nodes[i + 1] - mesh.nodes[i];

    let pinned_last = matches!(spec.outer_bc, OuterBc::Dirichlet);
    let unknowns = if pinned_last { n - 1 } else { n };

    let mut sub = vec![T::zero(); unknowns];
    let mut diag = vec![T::zero(); unknowns];
    let mut sup = vec![T::zero(); unknowns];
    let mut mass = vec![T::zero(); unknowns];

    for i in 0..unknowns {
        let mut d = T::zero();
        let mut v = T::zero();
        if i > 0 {
            let w = conductivity(i - 1) / spacing(i - 1);
            sub[i] = -w;
            d = d + w + reaction(i - 1) * spacing(i - 1) * half;
            v = v + spacing(i - 1) * half;
        }
        if i + 1 < n {
            let w = conductivity(i) / spacing(i);
            d = d + w + reaction(i) * spacing(i) * half;
            v = v + spacing(i) * half;
            if i + 1 < unknowns {
                sup[i] = -w;
            }
            // i + 1 == unknowns < n: neighbor pinned to zero, its coupling
            // stays on the diagonal only.
        }
        diag[i] = d;
        mass[i] = v;
    }

    let h_bulk = spacing(i_face - 1);
    let h_layer = spacing(i_face);
    let check = InterfaceCheck {
        idx: i_face,
        left_coeff: spec.k / h_bulk,
        right_coeff: Some(spec.sigma / h_layer),
        robin_b: T::zero(),
        vol_left: h_bulk * half,
        vol_right: h_layer * half,
        reaction_left: spec.k * mode.lambda * h_bulk * half,
        reaction_right: reaction_layer * h_layer * half,
    };

    ModeSystem {
        sub,
        diag,
        sup,
        mass,
        pinned_last,
        check: Some(check),
    }
}

/// Solve the two-domain problem by per-mode implicit time stepping.
pub fn solve_full<T: Real>(
    spec: &FullProblemSpec<T>,
    parallelism: Parallelism,
) -> Result<Trajectory<T>> {
    spec.validate()?;
    let mesh = Arc::new(spec.grid.mesh());
    let plan = spec.plan()?;
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
        .map(|(idx, mode)| ModeProblem {
            system: assemble_mode_system(mode, spec, &mesh),
            initial: u0.mode_profile(idx).to_vec(),
            source: source.as_ref().map(|f| f.mode_profile(idx).to_vec()),
        })
        .collect();
    run(spec.torus, mesh, &problems, &plan, parallelism)
}

/// Discrete energy bookkeeping of a trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport<T> {
    pub stamps: Vec<T>,
    /// Squared L2 norm over the whole domain per stamp.
    pub l2_sq: Vec<T>,
    /// Discrete Dirichlet energy `int grad u . A grad u` per stamp.
    pub dirichlet_energy: Vec<T>,
    /// Total heat `int u` per stamp.
    pub total_heat: Vec<T>,
    /// For source-free runs: whether the L2 norm was nonincreasing across
    /// the stored stamps (roundoff slack only). `None` when a source is
    /// present.
    pub l2_nonincreasing: Option<bool>,
}

/// Evaluate norms, energies and total heat along a trajectory of
/// [`solve_full`].
pub fn energy_report<T: Real>(
    traj: &Trajectory<T>,
    spec: &FullProblemSpec<T>,
) -> Result<EnergyReport<T>> {
    let mesh = &traj.mesh;
    if mesh.len() != spec.grid.mesh().len() {
        return Err(Error::TrajectoryMismatch(
            "trajectory mesh does not match the problem grid".into(),
        ));
    }
    let systems: Vec<ModeSystem<T>> = spec
        .torus
        .modes()
        .iter()
        .map(|mode| assemble_mode_system(mode, spec, mesh))
        .collect();
    Ok(energy_from_systems(traj, &systems, spec.source.is_none()))
}

/// Shared energy bookkeeping over preassembled per-mode systems.
pub(crate) fn energy_from_systems<T: Real>(
    traj: &Trajectory<T>,
    systems: &[ModeSystem<T>],
    source_free: bool,
) -> EnergyReport<T> {
    let weights = traj.mesh.weights();
    let mean_mode = traj
        .torus
        .mode_position(0, 0)
        .expect("mode set contains the mean");
    let root_area = traj.torus.area().sqrt();

    let mut l2_sq = Vec::with_capacity(traj.fields.len());
    let mut dirichlet_energy = Vec::with_capacity(traj.fields.len());
    let mut total_heat = Vec::with_capacity(traj.fields.len());
    for field in &traj.fields {
        let norm = norm_l2_full(field);
        l2_sq.push(norm * norm);
        let mut energy = T::zero();
        for (mode_idx, system) in systems.iter().enumerate() {
            energy = energy + system.energy(field.mode_profile(mode_idx));
        }
        dirichlet_energy.push(energy);
        let heat = field
            .mode_profile(mean_mode)
            .iter()
            .zip(&weights)
            .fold(T::zero(), |acc, (c, w)| acc + *w * c.re);
        total_heat.push(root_area * heat);
    }

    let l2_nonincreasing = if source_free {
        let slack = T::of(1e-12);
        Some(
            l2_sq
                .windows(2)
                .all(|w| w[1] <= w[0] * (T::one() + slack) + slack),
        )
    } else {
        None
    };

    EnergyReport {
        stamps: traj.stamps.clone(),
        l2_sq,
        dirichlet_energy,
        total_heat,
        l2_nonincreasing,
    }
}
