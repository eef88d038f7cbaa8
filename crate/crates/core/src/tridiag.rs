//! Tridiagonal systems via the Thomas algorithm.

use crate::Real;
use num_complex::Complex;

/// A tridiagonal matrix with a reusable LU-style factorization.
///
/// The solvers assemble one matrix per Fourier mode and then apply it every
/// time step, so the forward-elimination multipliers are computed once in
/// [`Tridiag::factor`] and reused by the `solve_*` calls.
#[derive(Debug, Clone)]
pub struct Tridiag<T> {
    sub: Vec<T>,
    diag: Vec<T>,
    sup: Vec<T>,
    /// Elimination multipliers `sub[i] / pivot[i-1]`.
    mult: Vec<T>,
    /// Pivots after forward elimination.
    pivot: Vec<T>,
}

impl<T: Real> Tridiag<T> {
    /// Factor the matrix with sub/main/super diagonals.
    ///
    /// `sub[0]` and `sup[n-1]` are ignored. Panics on a zero pivot; the
    /// matrices assembled in this crate are irreducibly diagonally dominant
    /// M-matrices, for which that cannot occur.
    pub fn factor(sub: Vec<T>, diag: Vec<T>, sup: Vec<T>) -> Self {
        let n = diag.len();
        assert!(n >= 1, "empty tridiagonal system");
        assert_eq!(sub.len(), n);
        assert_eq!(sup.len(), n);
        let mut mult = vec![T::zero(); n];
        let mut pivot = vec![T::zero(); n];
        pivot[0] = diag[0];
        assert!(pivot[0] != T::zero(), "singular tridiagonal system");
        for i in 1..n {
            mult[i] = sub[i] / pivot[i - 1];
            pivot[i] = diag[i] - mult[i] * sup[i - 1];
            assert!(pivot[i] != T::zero(), "singular tridiagonal system");
        }
        Self {
            sub,
            diag,
            sup,
            mult,
            pivot,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Solve in place for a real right-hand side.
    pub fn solve(&self, rhs: &mut [T]) {
        let n = self.len();
        assert_eq!(rhs.len(), n);
        for i in 1..n {
            rhs[i] = rhs[i] - rhs[i - 1] * self.mult[i];
        }
        rhs[n - 1] = rhs[n - 1] / self.pivot[n - 1];
        for i in (0..n - 1).rev() {
            rhs[i] = (rhs[i] - self.sup[i] * rhs[i + 1]) / self.pivot[i];
        }
    }

    /// Solve in place for a complex right-hand side (matrix stays real).
    pub fn solve_complex(&self, rhs: &mut [Complex<T>]) {
        let n = self.len();
        assert_eq!(rhs.len(), n);
        for i in 1..n {
            let scaled = Complex::new(rhs[i - 1].re * self.mult[i], rhs[i - 1].im * self.mult[i]);
            rhs[i] = rhs[i] - scaled;
        }
        rhs[n - 1] = div(rhs[n - 1], self.pivot[n - 1]);
        for i in (0..n - 1).rev() {
            let coupled = scale(rhs[i + 1], self.sup[i]);
            rhs[i] = div(rhs[i] - coupled, self.pivot[i]);
        }
    }

    /// y = A x for a real vector.
    pub fn mul(&self, x: &[T]) -> Vec<T> {
        let n = self.len();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y = y + self.sub[i] * x[i - 1];
                }
                if i + 1 < n {
                    y = y + self.sup[i] * x[i + 1];
                }
                y
            })
            .collect()
    }
}

fn scale<T: Real>(z: Complex<T>, a: T) -> Complex<T> {
    Complex::new(z.re * a, z.im * a)
}

fn div<T: Real>(z: Complex<T>, a: T) -> Complex<T> {
    Complex::new(z.re / a, z.im / a)
}
