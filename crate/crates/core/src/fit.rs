//! Least-squares fits used by the asymptotic diagnostics and the sweep
//! reports.

use crate::Real;

/// Least-squares slope of `log y` against `log x`.
///
/// Points with a nonpositive coordinate are skipped (they carry no log-log
/// information; an exactly-zero deviation is a better result than any fit).
/// Returns `None` when fewer than two usable points remain.
pub fn log_log_slope<T: Real>(xs: &[T], ys: &[T]) -> Option<T> {
    let pts: Vec<(T, T)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > T::zero() && **y > T::zero())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    slope(&pts)
}

/// Fit `y = c * x^p` by least squares in log space, returning `(c, p)`.
pub fn fit_power_law<T: Real>(xs: &[T], ys: &[T]) -> Option<(T, T)> {
    let pts: Vec<(T, T)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > T::zero() && **y > T::zero())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let p = slope(&pts)?;
    let n = T::of_usize(pts.len());
    let mean_x = pts.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let mean_y = pts.iter().fold(T::zero(), |a, p| a + p.1) / n;
    Some(((mean_y - p * mean_x).exp(), p))
}

fn slope<T: Real>(pts: &[(T, T)]) -> Option<T> {
    if pts.len() < 2 {
        return None;
    }
    let n = T::of_usize(pts.len());
    let mean_x = pts.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let mean_y = pts.iter().fold(T::zero(), |a, p| a + p.1) / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (x, y) in pts {
        sxx = sxx + (*x - mean_x) * (*x - mean_x);
        sxy = sxy + (*x - mean_x) * (*y - mean_y);
    }
    if sxx == T::zero() {
        return None;
    }
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let xs = [0.02f64, 0.01, 0.005];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x.powi(3)).collect();
        let (c, p) = fit_power_law(&xs, &ys).unwrap();
        assert!((p - 3.0).abs() < 1e-12);
        assert!((c - 2.5).abs() < 1e-12);
    }

    #[test]
    fn skips_zero_points() {
        let xs = [1.0f64, 2.0, 4.0];
        let ys = [0.0, 2.0, 4.0];
        let s = log_log_slope(&xs, &ys).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points_is_none() {
        assert!(log_log_slope(&[1.0f64], &[1.0]).is_none());
    }
}
