//! JSON configuration schema consumed by the `ebc` command line tool.
//!
//! All quantities are dimensionless numbers; scaling laws are
//! `{"prefactor": a, "exponent": p}` meaning `a * delta^p`; cap heights are
//! numbers or the string `"inf"`. Coating scalings pick the coating type by
//! tag: `{"coating_type": "type_i", "sigma": ..., "mu": ...}` or
//! `{"coating_type": "type_ii", "sigma": ..., "mu1": ..., "mu2": ...}`.

use crate::data::{FieldData, ModeEntry, SourceData};
use crate::effective::EffectiveProblemSpec;
use crate::error::{Error, Result};
use crate::full::FullProblemSpec;
use crate::geometry::{SurfaceFunction, TorusSpec};
use crate::harness::ExperimentConfig;
use crate::operators::OperatorSpec;
use crate::scaling::{CoatingScaling, OuterBc, RegimeReport, ScalingLaw};
use crate::stepping::Scheme;
use crate::Real;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Coating scaling in config form: Type I names one tangential law.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "coating_type")]
pub enum ScalingConfig {
    #[serde(rename = "type_i")]
    TypeI {
        sigma: ScalingLaw<f64>,
        mu: ScalingLaw<f64>,
    },
    #[serde(rename = "type_ii")]
    TypeII {
        sigma: ScalingLaw<f64>,
        mu1: ScalingLaw<f64>,
        mu2: ScalingLaw<f64>,
    },
}

impl ScalingConfig {
    pub fn to_scaling(&self) -> Result<CoatingScaling<f64>> {
        match self {
            ScalingConfig::TypeI { sigma, mu } => Ok(CoatingScaling::type_i(*sigma, *mu)),
            ScalingConfig::TypeII { sigma, mu1, mu2 } => {
                CoatingScaling::type_ii(*sigma, *mu1, *mu2)
            }
        }
    }
}

/// `classify` subcommand input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub outer_bc: OuterBc,
    pub scaling: ScalingConfig,
}

/// One surface harmonic `cos_amp cos(k.s) + sin_amp sin(k.s)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HarmonicEntry {
    pub m: i64,
    pub n: i64,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// Build the surface function for a list of harmonics.
pub fn surface_from_harmonics<T: Real>(
    torus: TorusSpec<T>,
    entries: &[HarmonicEntry],
) -> Result<SurfaceFunction<T>> {
    let mut g = SurfaceFunction::zero(torus);
    let half_root_area = torus.area().sqrt() * T::of(0.5);
    for e in entries {
        let plus = torus.mode_position(e.m, e.n).ok_or_else(|| {
            Error::InvalidSpec(format!("mode ({}, {}) outside the retained band", e.m, e.n))
        })?;
        let minus = torus
            .mode_position(-e.m, -e.n)
            .expect("band closed under negation");
        let c = num_complex::Complex::new(
            half_root_area * T::of(e.cos),
            -half_root_area * T::of(e.sin),
        );
        g.coeffs[plus] = g.coeffs[plus] + c;
        g.coeffs[minus] = g.coeffs[minus] + c.conj();
    }
    Ok(g)
}

/// `operators` subcommand input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorsConfig {
    pub torus: TorusSpec<f64>,
    pub operator: OperatorSpec<f64>,
    pub g: Vec<HarmonicEntry>,
}

/// `solve-full` subcommand input: the problem plus output options.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveFullConfig {
    #[serde(flatten)]
    pub problem: FullProblemSpec<f64>,
    /// How many evenly spaced stored stamps land in the trajectory CSV.
    #[serde(default = "default_csv_stamps")]
    pub csv_stamps: usize,
    /// Mode-level worker threads; omitted means serial.
    #[serde(default)]
    pub threads: Option<usize>,
}

/// `solve-effective` subcommand input; the boundary condition comes inline
/// or from a previously written classify report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveEffectiveConfig {
    pub torus: TorusSpec<f64>,
    pub bulk_depth: f64,
    pub n_bulk: usize,
    pub k: f64,
    #[serde(default)]
    pub ebc: Option<crate::scaling::EbcKind<f64>>,
    /// Path (relative to the config file) of a classify JSON report to take
    /// the condition from.
    #[serde(default)]
    pub ebc_from: Option<String>,
    pub u0: FieldData<f64>,
    #[serde(default)]
    pub source: Option<SourceData<f64>>,
    pub t_end: f64,
    pub dt: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
    #[serde(default = "default_csv_stamps")]
    pub csv_stamps: usize,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl SolveEffectiveConfig {
    /// Resolve the boundary condition and produce the solver spec.
    pub fn to_spec(&self, config_dir: &Path) -> Result<EffectiveProblemSpec<f64>> {
        let ebc = match (&self.ebc, &self.ebc_from) {
            (Some(ebc), None) => *ebc,
            (None, Some(path)) => {
                let full_path = config_dir.join(path);
                let text = std::fs::read_to_string(&full_path)?;
                let report: RegimeReport<f64> = serde_json::from_str(&text)?;
                report.ebc
            }
            (Some(_), Some(_)) => {
                return Err(Error::InvalidSpec(
                    "give either ebc or ebc_from, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::InvalidSpec(
                    "one of ebc or ebc_from is required".into(),
                ))
            }
        };
        Ok(EffectiveProblemSpec {
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
        })
    }
}

/// `converge` subcommand input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergeConfig {
    pub torus: TorusSpec<f64>,
    pub bulk_depth: f64,
    pub n_bulk: usize,
    pub n_layer: usize,
    pub outer_bc: OuterBc,
    pub scaling: ScalingConfig,
    pub k: f64,
    pub u0: FieldData<f64>,
    #[serde(default)]
    pub source: Option<SourceData<f64>>,
    pub t_end: f64,
    pub dt: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
    pub delta_list: Vec<f64>,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl ConvergeConfig {
    pub fn to_experiment(&self) -> Result<ExperimentConfig<f64>> {
        Ok(ExperimentConfig {
            torus: self.torus,
            bulk_depth: self.bulk_depth,
            n_bulk: self.n_bulk,
            n_layer: self.n_layer,
            outer_bc: self.outer_bc,
            scaling: self.scaling.to_scaling()?,
            k: self.k,
            u0: self.u0.clone(),
            source: self.source.clone(),
            t_end: self.t_end,
            dt: self.dt,
            scheme: self.scheme,
            snapshot_every: self.snapshot_every,
            delta_list: self.delta_list.clone(),
        })
    }
}

fn default_csv_stamps() -> usize {
    5
}

fn default_snapshot_every() -> usize {
    1
}

/// Convenience: build field data from harmonic entries with one shared
/// profile (handy in tests and generated configs).
pub fn field_from_harmonics(
    entries: &[HarmonicEntry],
    profile: crate::data::RadialProfile<f64>,
) -> FieldData<f64> {
    FieldData {
        entries: entries
            .iter()
            .map(|e| ModeEntry {
                m: e.m,
                n: e.n,
                cos: e.cos,
                sin: e.sin,
                profile,
            })
            .collect(),
    }
}
