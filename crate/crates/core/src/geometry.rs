//! Flattened computational geometry: a flat 2-torus interface with a bulk
//! slab below and a coating slab above, plus the Fourier calculus on it.
//!
//! The interface is the flat torus of periods `l1 x l2`; the bulk occupies
//! `r in [-L, 0]` and the coating `r in [0, delta]`. Mode functions are the
//! unit-norm exponentials `exp(i(k1 s1 + k2 s2)) / sqrt(l1 l2)`, so Parseval
//! holds without weights: the surface L2 norm of a field equals the plain
//! Euclidean norm of its coefficient vector.
//!
//! Real-valued fields are represented by conjugate-symmetric coefficient
//! sets over the full mode rectangle `|m| <= m_max`, `|n| <= n_max`, ordered
//! lexicographically in `(m, n)`.

use crate::error::{Error, Result};
use crate::Real;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// The flat-torus interface and the retained Fourier band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusSpec<T> {
    /// Period in the first tangential coordinate `s1`.
    pub l1: T,
    /// Period in the second tangential coordinate `s2`.
    pub l2: T,
    /// Highest retained mode index along `s1`.
    pub m_max: usize,
    /// Highest retained mode index along `s2`.
    pub n_max: usize,
}

impl<T: Real> TorusSpec<T> {
    pub fn new(l1: T, l2: T, m_max: usize, n_max: usize) -> Result<Self> {
        if !(l1 > T::zero() && l1.is_finite() && l2 > T::zero() && l2.is_finite()) {
            return Err(Error::InvalidSpec(
                "torus periods must be positive and finite".into(),
            ));
        }
        Ok(Self {
            l1,
            l2,
            m_max,
            n_max,
        })
    }

    /// Square torus of period 2*pi with a symmetric band, the workhorse in
    /// tests.
    pub fn square_2pi(m_max: usize, n_max: usize) -> Self {
        let two_pi = T::of(2.0) * T::PI();
        Self::new(two_pi, two_pi, m_max, n_max).expect("valid by construction")
    }

    pub fn mode_count(&self) -> usize {
        (2 * self.m_max + 1) * (2 * self.n_max + 1)
    }

    /// Torus area `l1 * l2`.
    pub fn area(&self) -> T {
        self.l1 * self.l2
    }

    /// The retained modes in lexicographic `(m, n)` order.
    ///
    /// The set contains `(0, 0)` and is closed under `(m, n) -> (-m, -n)`,
    /// which is what conjugate symmetry of real fields needs.
    pub fn modes(&self) -> Vec<ModeIndex<T>> {
        let mut out = Vec::with_capacity(self.mode_count());
        let m_max = self.m_max as i64;
        let n_max = self.n_max as i64;
        for m in -m_max..=m_max {
            for n in -n_max..=n_max {
                out.push(ModeIndex::new(m, n, self.l1, self.l2));
            }
        }
        out
    }

    /// Position of mode `(m, n)` in the lexicographic ordering.
    pub fn mode_position(&self, m: i64, n: i64) -> Option<usize> {
        let (mm, nn) = (self.m_max as i64, self.n_max as i64);
        if m.abs() > mm || n.abs() > nn {
            return None;
        }
        Some(((m + mm) as usize) * (2 * self.n_max + 1) + (n + nn) as usize)
    }

    fn compatible(&self, other: &Self) -> bool {
        self.l1 == other.l1
            && self.l2 == other.l2
            && self.m_max == other.m_max
            && self.n_max == other.n_max
    }
}

/// Build the ordered mode list for a torus.
pub fn build_modes<T: Real>(spec: &TorusSpec<T>) -> Vec<ModeIndex<T>> {
    spec.modes()
}

/// One Fourier mode of the torus with its wavenumbers and eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeIndex<T> {
    pub m: i64,
    pub n: i64,
    /// Wavenumber `2 pi m / l1`.
    pub k1: T,
    /// Wavenumber `2 pi n / l2`.
    pub k2: T,
    /// Surface Laplacian eigenvalue `k1^2 + k2^2`.
    pub lambda: T,
}

impl<T: Real> ModeIndex<T> {
    pub fn new(m: i64, n: i64, l1: T, l2: T) -> Self {
        let two_pi = T::of(2.0) * T::PI();
        let k1 = two_pi * T::of(m as f64) / l1;
        let k2 = two_pi * T::of(n as f64) / l2;
        Self {
            m,
            n,
            k1,
            k2,
            lambda: k1 * k1 + k2 * k2,
        }
    }

    /// Anisotropic eigenvalue `k1^2 + c k2^2`, `c in [0, 1]`.
    pub fn lambda_aniso(&self, c: T) -> T {
        self.k1 * self.k1 + c * self.k2 * self.k2
    }

    pub fn is_mean(&self) -> bool {
        self.m == 0 && self.n == 0
    }
}

/// Radial discretization: uniform nodes on the bulk `[-L, 0]` and the layer
/// `[0, delta]`, the interface node shared exactly once.
///
/// Node counts include both endpoints of their interval, so the bulk spacing
/// is `L / (n_bulk - 1)`. Keeping the two resolutions independent lets the
/// layer stay resolved with a fixed node count while `delta` shrinks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid<T> {
    /// Bulk depth `L`; bulk nodes live on `[-L, 0]`.
    pub bulk_depth: T,
    /// Number of bulk nodes on `[-L, 0]`, interface included.
    pub n_bulk: usize,
    /// Coating thickness `delta`; layer nodes live on `[0, delta]`.
    pub delta: T,
    /// Number of layer nodes on `[0, delta]`, interface included.
    pub n_layer: usize,
}

impl<T: Real> RadialGrid<T> {
    pub fn new(bulk_depth: T, n_bulk: usize, delta: T, n_layer: usize) -> Result<Self> {
        if !(bulk_depth > T::zero() && bulk_depth.is_finite()) {
            return Err(Error::InvalidSpec("bulk depth must be positive".into()));
        }
        if !(delta > T::zero() && delta.is_finite()) {
            return Err(Error::InvalidSpec(
                "coating thickness must be positive".into(),
            ));
        }
        if n_bulk < 3 || n_layer < 3 {
            return Err(Error::InvalidSpec(
                "need at least 3 nodes per subdomain".into(),
            ));
        }
        Ok(Self {
            bulk_depth,
            n_bulk,
            delta,
            n_layer,
        })
    }

    /// The two-domain mesh (bulk + layer).
    pub fn mesh(&self) -> RadialMesh<T> {
        RadialMesh::two_domain(self.bulk_depth, self.n_bulk, self.delta, self.n_layer)
    }

    /// The bulk-only mesh on `[-L, 0]` with the same bulk nodes.
    pub fn bulk_mesh(&self) -> RadialMesh<T> {
        RadialMesh::bulk_only(self.bulk_depth, self.n_bulk)
    }
}

/// Concrete radial node set with trapezoid / control-volume weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMesh<T> {
    /// Node coordinates, increasing; `nodes[interface] == 0`.
    pub nodes: Vec<T>,
    /// Index of the interface node `r = 0`.
    pub interface: usize,
    /// Number of bulk nodes (`interface + 1`).
    pub n_bulk: usize,
}

impl<T: Real> RadialMesh<T> {
    pub fn two_domain(bulk_depth: T, n_bulk: usize, delta: T, n_layer: usize) -> Self {
        assert!(n_bulk >= 3 && n_layer >= 3);
        let hb = bulk_depth / T::of_usize(n_bulk - 1);
        let hl = delta / T::of_usize(n_layer - 1);
        let mut nodes = Vec::with_capacity(n_bulk + n_layer - 1);
        for i in 0..n_bulk - 1 {
            nodes.push(-bulk_depth + hb * T::of_usize(i));
        }
        nodes.push(T::zero());
        for j in 1..n_layer - 1 {
            nodes.push(hl * T::of_usize(j));
        }
        nodes.push(delta);
        RadialMesh {
            nodes,
            interface: n_bulk - 1,
            n_bulk,
        }
    }

    pub fn bulk_only(depth: T, n_bulk: usize) -> Self {
        assert!(n_bulk >= 3);
        let hb = depth / T::of_usize(n_bulk - 1);
        let mut nodes = Vec::with_capacity(n_bulk);
        for i in 0..n_bulk - 1 {
            nodes.push(-depth + hb * T::of_usize(i));
        }
        nodes.push(T::zero());
        RadialMesh {
            nodes,
            interface: n_bulk - 1,
            n_bulk,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Whether this mesh carries a layer part above the interface.
    pub fn has_layer(&self) -> bool {
        self.interface + 1 < self.nodes.len()
    }

    /// Trapezoid weights over all nodes (equal to the control volumes of a
    /// node-centered finite-volume scheme).
    pub fn weights(&self) -> Vec<T> {
        let n = self.len();
        let half = T::of(0.5);
        (0..n)
            .map(|i| {
                let left = if i > 0 {
                    self.nodes[i] - self.nodes[i - 1]
                } else {
                    T::zero()
                };
                let right = if i + 1 < n {
                    self.nodes[i + 1] - self.nodes[i]
                } else {
                    T::zero()
                };
                half * (left + right)
            })
            .collect()
    }

    /// Trapezoid weights of the bulk restriction `[-L, 0]`; the interface
    /// node only carries its bulk-side half cell.
    pub fn bulk_weights(&self) -> Vec<T> {
        let half = T::of(0.5);
        (0..self.n_bulk)
            .map(|i| {
                let left = if i > 0 {
                    self.nodes[i] - self.nodes[i - 1]
                } else {
                    T::zero()
                };
                let right = if i + 1 < self.n_bulk {
                    self.nodes[i + 1] - self.nodes[i]
                } else {
                    T::zero()
                };
                half * (left + right)
            })
            .collect()
    }
}

/// A function on the torus held as per-mode complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceFunction<T> {
    pub torus: TorusSpec<T>,
    /// Coefficients aligned with `torus.modes()`.
    pub coeffs: Vec<Complex<T>>,
}

impl<T: Real> SurfaceFunction<T> {
    pub fn zero(torus: TorusSpec<T>) -> Self {
        Self {
            coeffs: vec![Complex::new(T::zero(), T::zero()); torus.mode_count()],
            torus,
        }
    }

    /// Build from `(m, n) -> coefficient` pairs; missing conjugate partners
    /// are filled in so the represented field is real.
    pub fn from_modes(torus: TorusSpec<T>, entries: &[(i64, i64, Complex<T>)]) -> Result<Self> {
        let mut f = Self::zero(torus);
        for &(m, n, c) in entries {
            let idx = torus.mode_position(m, n).ok_or_else(|| {
                Error::InvalidSpec(format!("mode ({m}, {n}) outside the retained band"))
            })?;
            f.coeffs[idx] = f.coeffs[idx] + c;
        }
        f.symmetrize();
        Ok(f)
    }

    /// Project onto the conjugate-symmetric (real-field) part.
    pub fn symmetrize(&mut self) {
        let modes = self.torus.modes();
        let half = T::of(0.5);
        for (i, mode) in modes.iter().enumerate() {
            let j = self
                .torus
                .mode_position(-mode.m, -mode.n)
                .expect("mode set closed under negation");
            if j < i {
                continue;
            }
            let a = self.coeffs[i];
            let b = self.coeffs[j];
            let sym = Complex::new(half * (a.re + b.re), half * (a.im - b.im));
            self.coeffs[i] = sym;
            self.coeffs[j] = sym.conj();
        }
    }

    /// Largest violation of `coeff(-m,-n) == conj(coeff(m,n))`.
    pub fn conjugate_symmetry_error(&self) -> T {
        let modes = self.torus.modes();
        let mut worst = T::zero();
        for (i, mode) in modes.iter().enumerate() {
            let j = self.torus.mode_position(-mode.m, -mode.n).unwrap();
            let d = self.coeffs[i] - self.coeffs[j].conj();
            worst = worst.max(d.norm());
        }
        worst
    }

    /// Surface L2 norm; Parseval makes this the coefficient norm.
    pub fn norm_l2(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |a, c| a + c.norm_sqr())
            .sqrt()
    }

    /// Surface inner product `<f, g>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert!(self.torus.compatible(&other.torus));
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * *b
            })
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.torus.compatible(&other.torus));
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| *a + *b)
            .collect();
        Self {
            torus: self.torus,
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert!(self.torus.compatible(&other.torus));
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| *a - *b)
            .collect();
        Self {
            torus: self.torus,
            coeffs,
        }
    }

    pub fn scale(&self, factor: T) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| Complex::new(c.re * factor, c.im * factor))
            .collect();
        Self {
            torus: self.torus,
            coeffs,
        }
    }

    /// Multiply each coefficient by `(i k1)^a (i k2)^b` — the spectral
    /// partial derivative of order `(a, b)`.
    pub fn derivative(&self, a: u32, b: u32) -> Self {
        let modes = self.torus.modes();
        let mut out = self.clone();
        for (i, mode) in modes.iter().enumerate() {
            let factor = ipow(mode.k1, a) * ipow(mode.k2, b);
            out.coeffs[i] = out.coeffs[i] * factor;
        }
        out
    }

    /// Evaluate on the uniform `n1 x n2` sampling grid (row-major in `s1`).
    pub fn to_samples(&self, n1: usize, n2: usize) -> Vec<T> {
        let modes = self.torus.modes();
        let norm = T::one() / self.torus.area().sqrt();
        let mut out = vec![T::zero(); n1 * n2];
        for (idx, mode) in modes.iter().enumerate() {
            let c = self.coeffs[idx];
            if c.re == T::zero() && c.im == T::zero() {
                continue;
            }
            for j1 in 0..n1 {
                let s1 = self.torus.l1 * T::of_usize(j1) / T::of_usize(n1);
                for j2 in 0..n2 {
                    let s2 = self.torus.l2 * T::of_usize(j2) / T::of_usize(n2);
                    let phase = mode.k1 * s1 + mode.k2 * s2;
                    // real part of c * exp(i phase); the imaginary parts of a
                    // conjugate-symmetric sum cancel exactly.
                    out[j1 * n2 + j2] =
                        out[j1 * n2 + j2] + norm * (c.re * phase.cos() - c.im * phase.sin());
                }
            }
        }
        out
    }

    /// Pointwise maximum of `|f|` on the sampling grid.
    pub fn max_abs_on_grid(&self, n1: usize, n2: usize) -> T {
        self.to_samples(n1, n2)
            .iter()
            .fold(T::zero(), |a, v| a.max(v.abs()))
    }
}

fn ipow<T: Real>(k: T, order: u32) -> Complex<T> {
    // (i k)^order without complex exponentials.
    let mag = k.powi(order as i32);
    match order % 4 {
        0 => Complex::new(mag, T::zero()),
        1 => Complex::new(T::zero(), mag),
        2 => Complex::new(-mag, T::zero()),
        _ => Complex::new(T::zero(), -mag),
    }
}

/// Forward transform of real samples on the uniform `n1 x n2` grid.
///
/// Exact (up to roundoff) for fields band-limited to the retained modes,
/// which requires `n1 >= 2 m_max + 1` and `n2 >= 2 n_max + 1`; coarser grids
/// are rejected.
pub fn transform<T: Real>(
    torus: &TorusSpec<T>,
    n1: usize,
    n2: usize,
    samples: &[T],
) -> Result<SurfaceFunction<T>> {
    if n1 < 2 * torus.m_max + 1 {
        return Err(Error::GridTooCoarse {
            need: 2 * torus.m_max + 1,
            got: n1,
        });
    }
    if n2 < 2 * torus.n_max + 1 {
        return Err(Error::GridTooCoarse {
            need: 2 * torus.n_max + 1,
            got: n2,
        });
    }
    if samples.len() != n1 * n2 {
        return Err(Error::InvalidSpec(format!(
            "expected {} samples, got {}",
            n1 * n2,
            samples.len()
        )));
    }
    let modes = torus.modes();
    let mut out = SurfaceFunction::zero(*torus);
    let scale = torus.area().sqrt() / T::of_usize(n1 * n2);
    for (idx, mode) in modes.iter().enumerate() {
        let mut acc = Complex::new(T::zero(), T::zero());
        for j1 in 0..n1 {
            let s1 = torus.l1 * T::of_usize(j1) / T::of_usize(n1);
            for j2 in 0..n2 {
                let s2 = torus.l2 * T::of_usize(j2) / T::of_usize(n2);
                let phase = -(mode.k1 * s1 + mode.k2 * s2);
                let v = samples[j1 * n2 + j2];
                acc = acc + Complex::new(v * phase.cos(), v * phase.sin());
            }
        }
        out.coeffs[idx] = Complex::new(acc.re * scale, acc.im * scale);
    }
    Ok(out)
}

/// Surface L2 norm of raw grid samples (left Riemann rule, exact for the
/// periodic trapezoid).
pub fn grid_norm_l2<T: Real>(torus: &TorusSpec<T>, n1: usize, n2: usize, samples: &[T]) -> T {
    let cell = torus.area() / T::of_usize(n1 * n2);
    (samples.iter().fold(T::zero(), |a, v| a + *v * *v) * cell).sqrt()
}

/// Space-time solution state: one complex coefficient per mode per radial
/// node, with the geometry it lives on and its time stamp.
#[derive(Debug, Clone)]
pub struct SpectralField<T> {
    pub torus: TorusSpec<T>,
    pub mesh: Arc<RadialMesh<T>>,
    pub time: T,
    /// Flattened `[mode][node]` coefficients.
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> SpectralField<T> {
    pub fn zero(torus: TorusSpec<T>, mesh: Arc<RadialMesh<T>>, time: T) -> Self {
        let len = torus.mode_count() * mesh.len();
        Self {
            torus,
            mesh,
            time,
            coeffs: vec![Complex::new(T::zero(), T::zero()); len],
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.mesh.len()
    }

    pub fn coeff(&self, mode: usize, node: usize) -> Complex<T> {
        self.coeffs[mode * self.mesh.len() + node]
    }

    pub fn set_coeff(&mut self, mode: usize, node: usize, v: Complex<T>) {
        let n = self.mesh.len();
        self.coeffs[mode * n + node] = v;
    }

    pub fn mode_profile(&self, mode: usize) -> &[Complex<T>] {
        let n = self.mesh.len();
        &self.coeffs[mode * n..(mode + 1) * n]
    }

    pub fn mode_profile_mut(&mut self, mode: usize) -> &mut [Complex<T>] {
        let n = self.mesh.len();
        &mut self.coeffs[mode * n..(mode + 1) * n]
    }

    /// Trace on the interface `r = 0`.
    pub fn trace(&self) -> SurfaceFunction<T> {
        let mut g = SurfaceFunction::zero(self.torus);
        for mode in 0..self.torus.mode_count() {
            g.coeffs[mode] = self.coeff(mode, self.mesh.interface);
        }
        g
    }

    /// Largest violation of conjugate symmetry across all nodes.
    pub fn conjugate_symmetry_error(&self) -> T {
        let modes = self.torus.modes();
        let mut worst = T::zero();
        for (i, mode) in modes.iter().enumerate() {
            let j = self.torus.mode_position(-mode.m, -mode.n).unwrap();
            for node in 0..self.mesh.len() {
                let d = self.coeff(i, node) - self.coeff(j, node).conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// L2 norm over the bulk `[-L, 0] x torus`: Parseval in the modes, trapezoid
/// quadrature in `r`.
pub fn norm_l2_bulk<T: Real>(field: &SpectralField<T>) -> T {
    let w = field.mesh.bulk_weights();
    let mut acc = T::zero();
    for mode in 0..field.torus.mode_count() {
        let profile = field.mode_profile(mode);
        for (i, wi) in w.iter().enumerate() {
            acc = acc + *wi * profile[i].norm_sqr();
        }
    }
    acc.sqrt()
}

/// L2 norm over the whole domain the field lives on.
pub fn norm_l2_full<T: Real>(field: &SpectralField<T>) -> T {
    let w = field.mesh.weights();
    let mut acc = T::zero();
    for mode in 0..field.torus.mode_count() {
        let profile = field.mode_profile(mode);
        for (i, wi) in w.iter().enumerate() {
            acc = acc + *wi * profile[i].norm_sqr();
        }
    }
    acc.sqrt()
}
