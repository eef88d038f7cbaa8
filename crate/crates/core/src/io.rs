//! Deterministic report output: fixed float formatting, fixed column and
//! summation orders, atomic file writes. Identical inputs produce
//! byte-identical files.

use crate::error::Result;
use crate::full::EnergyReport;
use crate::geometry::SurfaceFunction;
use crate::harness::ConvergenceReport;
use crate::operators::OperatorSpec;
use crate::stepping::Trajectory;
use crate::Real;
use std::path::Path;

/// Render a scalar with 17 significant digits, enough to round-trip `f64`.
pub fn fmt<T: Real>(x: T) -> String {
    format!("{x:.16e}")
}

/// Write a file atomically: temp file in the target directory, then rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    let tmp = dir.join(format!(".{file_name}.tmp"));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Per-mode operator evaluation rows: `m,n,lambda_eff,symbol,flux_re,flux_im`.
pub fn operators_csv<T: Real>(
    spec: &OperatorSpec<T>,
    g: &SurfaceFunction<T>,
    flux: &SurfaceFunction<T>,
) -> String {
    let mut out = String::from("m,n,lambda_eff,symbol,flux_re,flux_im\n");
    for (idx, mode) in g.torus.modes().iter().enumerate() {
        let lambda_eff = spec.lambda_eff(mode.k1, mode.k2);
        let symbol = crate::operators::dtn_symbol(spec.variant, lambda_eff, spec.cap)
            .expect("lambda_eff >= 0 by construction");
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            mode.m,
            mode.n,
            fmt(lambda_eff),
            fmt(symbol),
            fmt(flux.coeffs[idx].re),
            fmt(flux.coeffs[idx].im)
        ));
    }
    out
}

/// Evenly spaced indices into the stored stamps, endpoints included.
pub fn select_stamps(total: usize, wanted: usize) -> Vec<usize> {
    if total == 0 {
        return Vec::new();
    }
    let wanted = wanted.clamp(1, total);
    if wanted == 1 {
        return vec![total - 1];
    }
    let mut picks: Vec<usize> = (0..wanted)
        .map(|i| i * (total - 1) / (wanted - 1))
        .collect();
    picks.dedup();
    picks
}

/// Trajectory snapshot rows: `t,m,n,r,coeff_re,coeff_im` for the selected
/// stamps.
pub fn trajectory_csv<T: Real>(traj: &Trajectory<T>, csv_stamps: usize) -> String {
    let mut out = String::from("t,m,n,r,coeff_re,coeff_im\n");
    let modes = traj.torus.modes();
    for stamp_idx in select_stamps(traj.stamps.len(), csv_stamps) {
        let field = &traj.fields[stamp_idx];
        for (mode_idx, mode) in modes.iter().enumerate() {
            for (node, r) in traj.mesh.nodes.iter().enumerate() {
                let c = field.coeff(mode_idx, node);
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    fmt(field.time),
                    mode.m,
                    mode.n,
                    fmt(*r),
                    fmt(c.re),
                    fmt(c.im)
                ));
            }
        }
    }
    out
}

/// Energy rows: `t,l2_sq,dirichlet_energy,total_heat`.
pub fn energy_csv<T: Real>(report: &EnergyReport<T>) -> String {
    let mut out = String::from("t,l2_sq,dirichlet_energy,total_heat\n");
    for i in 0..report.stamps.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt(report.stamps[i]),
            fmt(report.l2_sq[i]),
            fmt(report.dirichlet_energy[i]),
            fmt(report.total_heat[i])
        ));
    }
    out
}

/// Sweep rows: `delta,sigma,mu1,mu2,h,error_sup_L2,error_final`.
pub fn convergence_csv<T: Real>(report: &ConvergenceReport<T>) -> String {
    let mut out = String::from("delta,sigma,mu1,mu2,h,error_sup_L2,error_final\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt(row.delta),
            fmt(row.sigma),
            fmt(row.mu1),
            fmt(row.mu2),
            fmt(row.h),
            fmt(row.error_sup_l2),
            fmt(row.error_final)
        ));
    }
    out
}
