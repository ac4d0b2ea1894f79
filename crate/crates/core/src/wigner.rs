//! Wigner d- and D-matrices.
//!
//! Matrices are `(2l+1) × (2l+1)` with rows and columns indexed by `m, n ∈ [-l, l]`;
//! entry `(m, n)` lives at storage position `(m + l, n + l)`.
//!
//! The representation is fixed by `Dˡ(Z(α)) = e^{-iαΛˡ}` and by `Dˡ(Y(β)) = dˡ(β)`,
//! where `dˡ(β)` is the exponential of `β/2` times the skew-symmetric tridiagonal
//! generator `Qˡ − (Qˡ)ᵀ`. Everything else is computed from the matrices
//! `Δˡ = dˡ(π/2)` through the trigonometric expansion
//!
//! ```text
//! dˡₘₙ(β) = i^{n−m} Σₛ Δˡₛₘ Δˡₛₙ e^{isβ}
//! ```
//!
//! which is also what the fast transform in [`crate::so3fft`] relies on.

use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Maximum representation degree kept in a spectral signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BandLimit(pub usize);

impl BandLimit {
    pub fn degree(self) -> usize {
        self.0
    }

    /// Number of coefficients `Σ_{l=0}^{L} (2l+1)²` of a full spectrum.
    pub fn spectrum_len(self) -> usize {
        spectrum_offset(self.0 + 1)
    }
}

/// Storage offset of degree `l` in the ragged `l`-major layout: `Σ_{k<l} (2k+1)²`.
pub fn spectrum_offset(l: usize) -> usize {
    (4 * l * l * l - l) / 3
}

#[inline]
pub(crate) fn idx(l: usize, m: i32) -> usize {
    (m + l as i32) as usize
}

/// `i^k` for any integer `k`.
pub fn i_pow(k: i32) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `(-1)^k`.
#[inline]
pub fn sign(k: i32) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The skew-symmetric generator `Gˡ = Qˡ − (Qˡ)ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    degree: usize,
    entries: DMatrix<f64>,
}

impl GeneratorMatrix {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, m: i32, n: i32) -> f64 {
        self.entries[(idx(self.degree, m), idx(self.degree, n))]
    }

    /// The diagonal of `Λˡ`, i.e. `-l..=l`.
    pub fn lambda(&self) -> Vec<i32> {
        let l = self.degree as i32;
        (-l..=l).collect()
    }
}

/// `qˡₙ = √((l−n)(l+n+1))`, the superdiagonal of `Qˡ`.
pub fn ladder_coefficient(l: usize, n: i32) -> f64 {
    let l = l as f64;
    let n = n as f64;
    ((l - n) * (l + n + 1.0)).max(0.0).sqrt()
}

pub fn generator(l: usize) -> GeneratorMatrix {
    let dim = 2 * l + 1;
    let mut entries = DMatrix::zeros(dim, dim);
    for m in -(l as i32)..(l as i32) {
        let q = ladder_coefficient(l, m);
        entries[(idx(l, m), idx(l, m + 1))] = q;
        entries[(idx(l, m + 1), idx(l, m))] = -q;
    }
    GeneratorMatrix { degree: l, entries }
}

/// The real orthogonal matrix `Δˡ = dˡ(π/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerDelta {
    degree: usize,
    entries: DMatrix<f64>,
}

impl WignerDelta {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    #[inline]
    pub fn get(&self, s: i32, m: i32) -> f64 {
        self.entries[(idx(self.degree, s), idx(self.degree, m))]
    }

    /// Wraps an arbitrary matrix; used by fault-injection hooks in self tests.
    pub fn from_entries(degree: usize, entries: DMatrix<f64>) -> Self {
        assert_eq!(entries.nrows(), 2 * degree + 1);
        assert_eq!(entries.ncols(), 2 * degree + 1);
        WignerDelta { degree, entries }
    }

    /// Largest violation of `Δ₋ₛ,₋ₘ = (−1)^{s−m} Δₛₘ`.
    pub fn symmetry_defect(&self) -> f64 {
        let l = self.degree as i32;
        let mut worst = 0.0f64;
        for s in -l..=l {
            for m in -l..=l {
                let d = self.get(-s, -m) - sign(s - m) * self.get(s, m);
                worst = worst.max(d.abs());
            }
        }
        worst
    }

    /// `‖ΔᵀΔ − I‖_max`.
    pub fn orthogonality_defect(&self) -> f64 {
        orthogonality_defect(&self.entries)
    }
}

/// `‖AᵀA − I‖_max` of a square real matrix.
pub fn orthogonality_defect(a: &DMatrix<f64>) -> f64 {
    let prod = a.transpose() * a;
    let mut worst = 0.0f64;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - target).abs());
        }
    }
    worst
}

fn compute_delta(l: usize) -> WignerDelta {
    let dim = 2 * l + 1;
    if l == 0 {
        return WignerDelta {
            degree: 0,
            entries: DMatrix::from_element(1, 1, 1.0),
        };
    }
    // H = (Q − Qᵀ)/2 = i·P·S·P* with S = (Q + Qᵀ)/2 real symmetric and P = diag(i^m),
    // so e^{(π/2)H} = P (Σ_μ i^μ u_μ u_μᵀ) P* for the eigenpairs (μ, u_μ) of S.
    let mut sym = DMatrix::zeros(dim, dim);
    for m in -(l as i32)..(l as i32) {
        let q = 0.5 * ladder_coefficient(l, m);
        sym[(idx(l, m), idx(l, m + 1))] = q;
        sym[(idx(l, m + 1), idx(l, m))] = q;
    }
    let eig = SymmetricEigen::new(sym);
    let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
    for (col, &mu) in eig.eigenvalues.iter().enumerate() {
        let phase = i_pow(mu.round() as i32);
        let u = eig.eigenvectors.column(col);
        for a in 0..dim {
            let ua = u[a];
            if ua == 0.0 {
                continue;
            }
            for b in 0..dim {
                acc[(a, b)] += phase * (ua * u[b]);
            }
        }
    }
    let li = l as i32;
    let mut entries = DMatrix::zeros(dim, dim);
    for a in -li..=li {
        for b in -li..=li {
            entries[(idx(l, a), idx(l, b))] = (i_pow(a - b) * acc[(idx(l, a), idx(l, b))]).re;
        }
    }
    let mut delta = WignerDelta { degree: l, entries };
    enforce_symmetry(&mut delta);
    delta
}

fn enforce_symmetry(delta: &mut WignerDelta) {
    let l = delta.degree as i32;
    let d = delta.degree;
    let original = delta.entries.clone();
    for s in -l..=l {
        for m in -l..=l {
            let a = original[(idx(d, s), idx(d, m))];
            let b = sign(s - m) * original[(idx(d, -s), idx(d, -m))];
            delta.entries[(idx(d, s), idx(d, m))] = 0.5 * (a + b);
        }
    }
}

fn delta_cache() -> &'static RwLock<Vec<Arc<WignerDelta>>> {
    static CACHE: OnceLock<RwLock<Vec<Arc<WignerDelta>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(Vec::new()))
}

/// `Δˡ = dˡ(π/2)`, computed once per degree and shared afterwards.
pub fn wigner_delta(l: usize) -> Arc<WignerDelta> {
    {
        let cache = delta_cache().read().expect("delta cache poisoned");
        if let Some(d) = cache.get(l) {
            return Arc::clone(d);
        }
    }
    let mut cache = delta_cache().write().expect("delta cache poisoned");
    while cache.len() <= l {
        let next = cache.len();
        cache.push(Arc::new(compute_delta(next)));
    }
    Arc::clone(&cache[l])
}

/// `Δ⁰ … Δᴸ`.
pub fn wigner_deltas(band_limit: usize) -> Vec<Arc<WignerDelta>> {
    (0..=band_limit).map(wigner_delta).collect()
}

/// `dˡ(β)` evaluated through the `Δ` expansion.
pub fn wigner_d_via_delta(l: usize, beta: f64) -> DMatrix<f64> {
    wigner_d_with(&wigner_delta(l), beta)
}

/// Same as [`wigner_d_via_delta`] but with an explicit `Δ`.
pub fn wigner_d_with(delta: &WignerDelta, beta: f64) -> DMatrix<f64> {
    let l = delta.degree();
    let li = l as i32;
    let dim = 2 * l + 1;
    let phases: Vec<Complex64> = (-li..=li)
        .map(|s| Complex64::from_polar(1.0, s as f64 * beta))
        .collect();
    let mut out = DMatrix::zeros(dim, dim);
    for m in -li..=li {
        for n in m..=li {
            let mut acc = Complex64::new(0.0, 0.0);
            for s in -li..=li {
                let w = delta.get(s, m) * delta.get(s, n);
                if w != 0.0 {
                    acc += phases[idx(l, s)] * w;
                }
            }
            let v = (i_pow(n - m) * acc).re;
            out[(idx(l, m), idx(l, n))] = v;
            // dₙₘ = (−1)^{m−n} dₘₙ
            out[(idx(l, n), idx(l, m))] = sign(m - n) * v;
        }
    }
    out
}

/// `dˡ(β) = e^{(β/2)(Qˡ − Qˡᵀ)}`.
pub fn wigner_d(l: usize, beta: f64) -> DMatrix<f64> {
    wigner_d_via_delta(l, beta)
}

/// `Dˡ(Z(α)Y(β)Z(γ))`, entry `(m, n) = e^{−imα−inγ} dˡₘₙ(β)`.
#[allow(non_snake_case)]
pub fn wigner_D(l: usize, alpha: f64, beta: f64, gamma: f64) -> DMatrix<Complex64> {
    let d = wigner_d(l, beta);
    let li = l as i32;
    let dim = 2 * l + 1;
    DMatrix::from_fn(dim, dim, |r, c| {
        let m = r as i32 - li;
        let n = c as i32 - li;
        Complex64::from_polar(1.0, -(m as f64) * alpha - (n as f64) * gamma) * d[(r, c)]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    /// Scaling-and-squaring Taylor exponential, independent of the Δ route.
    fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
        let norm = a.iter().map(|v| v.abs()).fold(0.0, f64::max) * a.nrows() as f64;
        let squarings = if norm > 0.25 {
            (norm / 0.25).log2().ceil() as u32
        } else {
            0
        };
        let scaled = a / 2f64.powi(squarings as i32);
        let n = a.nrows();
        let mut term = DMatrix::identity(n, n);
        let mut sum = DMatrix::identity(n, n);
        for k in 1..30 {
            term = &term * &scaled / k as f64;
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    #[test]
    fn generator_small_degrees() {
        let g0 = generator(0);
        assert_eq!(g0.entries().shape(), (1, 1));
        assert_eq!(g0.get(0, 0), 0.0);

        let g1 = generator(1);
        assert!((g1.get(-1, 0) - SQRT_2).abs() < 1e-15);
        assert!((g1.get(0, 1) - SQRT_2).abs() < 1e-15);
        assert!((g1.get(0, -1) + SQRT_2).abs() < 1e-15);
        assert!((g1.get(1, 0) + SQRT_2).abs() < 1e-15);
        assert_eq!(g1.get(-1, 1), 0.0);
        assert_eq!(g1.get(0, 0), 0.0);
    }

    #[test]
    fn generator_is_skew_tridiagonal() {
        for l in 0..10 {
            let g = generator(l);
            let e = g.entries();
            assert_eq!(e + e.transpose(), DMatrix::zeros(2 * l + 1, 2 * l + 1));
            for r in 0..e.nrows() {
                for c in 0..e.ncols() {
                    if (r as i64 - c as i64).abs() > 1 {
                        assert_eq!(e[(r, c)], 0.0);
                    }
                }
            }
            assert_eq!(ladder_coefficient(l, l as i32), 0.0);
            assert_eq!(g.lambda().len(), 2 * l + 1);
        }
    }

    #[test]
    fn d_at_zero_is_identity() {
        for l in [0, 3, 5] {
            let d = wigner_d(l, 0.0);
            assert!(max_diff(&d, &DMatrix::identity(2 * l + 1, 2 * l + 1)) < 1e-14);
        }
    }

    #[test]
    fn delta_one_closed_form() {
        // e^{βH} with H = G¹/2 satisfies H³ = −H, so e^{βH} = I + sinβ H + (1 − cosβ) H².
        let h = generator(1).entries() * 0.5;
        let h2 = &h * &h;
        assert!(max_diff(&(&h2 * &h), &(-&h)) < 1e-15);
        let closed = |beta: f64| {
            DMatrix::identity(3, 3) + &h * beta.sin() + &h2 * (1.0 - beta.cos())
        };
        let delta = wigner_delta(1);
        assert!(max_diff(delta.entries(), &closed(FRAC_PI_2)) < 1e-14);
        assert!(max_diff(delta.entries(), &expm(&(&h * FRAC_PI_2))) < 1e-13);
        let r = 1.0 / SQRT_2;
        let expected = DMatrix::from_row_slice(3, 3, &[0.5, r, 0.5, -r, 0.0, r, 0.5, -r, 0.5]);
        assert!(max_diff(delta.entries(), &expected) < 1e-14);
        // the half-turn matrix swaps ±1 and flips 0
        let flip = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(max_diff(&wigner_d(1, PI), &flip) < 1e-14);
        assert!(max_diff(&closed(PI), &flip) < 1e-14);
    }

    #[test]
    fn delta_zero_is_one() {
        assert_eq!(wigner_delta(0).entries()[(0, 0)], 1.0);
    }

    #[test]
    fn delta_orthogonal_and_symmetric() {
        for l in 0..=16 {
            let d = wigner_delta(l);
            assert!(d.orthogonality_defect() < 1e-12, "l={l}");
            assert_eq!(d.symmetry_defect(), 0.0, "l={l}");
        }
        assert!(wigner_delta(8).orthogonality_defect() <= 1e-12);
    }

    #[test]
    fn delta_matches_matrix_exponential() {
        for l in [2, 5, 9, 14] {
            let h = generator(l).entries() * 0.5;
            let oracle = expm(&(h * FRAC_PI_2));
            assert!(max_diff(wigner_delta(l).entries(), &oracle) < 1e-11, "l={l}");
        }
    }

    #[test]
    fn delta_expansion_matches_exponential() {
        let h = generator(4).entries() * 0.5;
        let oracle = expm(&(h * 1.3));
        assert!(max_diff(&wigner_d_via_delta(4, 1.3), &oracle) <= 1e-10);
        let d1 = wigner_d_via_delta(1, FRAC_PI_2);
        assert!(max_diff(&d1, wigner_delta(1).entries()) < 1e-15);
        let d3 = wigner_d_via_delta(3, 0.0);
        assert!(max_diff(&d3, &DMatrix::identity(7, 7)) < 1e-14);
    }

    #[test]
    fn one_parameter_group() {
        let a = wigner_d(3, 0.4);
        let b = wigner_d(3, 0.9);
        assert!(max_diff(&(a * b), &wigner_d(3, 1.3)) < 1e-12);
    }

    #[test]
    fn d_orthogonal_and_reversible() {
        for l in 0..=16 {
            for &beta in &[0.1, 0.77, 2.0, 3.1, -1.4] {
                let d = wigner_d(l, beta);
                assert!(orthogonality_defect(&d) <= 1e-11);
                assert!(max_diff(&wigner_d(l, -beta), &d.transpose()) <= 1e-11);
            }
        }
    }

    #[test]
    fn big_d_z_rotation_is_diagonal_phase() {
        let alpha = 0.83;
        let d = wigner_D(1, alpha, 0.0, 0.0);
        let expected = [
            Complex64::from_polar(1.0, alpha),
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, -alpha),
        ];
        for r in 0..3 {
            for c in 0..3 {
                let e = if r == c { expected[r] } else { Complex64::new(0.0, 0.0) };
                assert!((d[(r, c)] - e).norm() < 1e-15);
            }
        }
        let id = wigner_D(2, 0.0, 0.0, 0.0);
        for r in 0..5 {
            for c in 0..5 {
                let e = if r == c { 1.0 } else { 0.0 };
                assert!((id[(r, c)] - Complex64::new(e, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn d_closed_form_entries_l1() {
        let beta = 0.6;
        let d = wigner_d(1, beta);
        assert!((d[(1, 1)] - beta.cos()).abs() < 1e-14);
        assert!((d[(2, 1)] + beta.sin() / SQRT_2).abs() < 1e-14);
        assert!((d[(2, 2)] - (1.0 + beta.cos()) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn spectrum_offsets() {
        assert_eq!(spectrum_offset(0), 0);
        assert_eq!(spectrum_offset(1), 1);
        assert_eq!(spectrum_offset(2), 10);
        assert_eq!(BandLimit(2).spectrum_len(), 35);
    }
}
