//! Spectral ↔ grid maps used inside layers, each paired with its exact adjoint.
//!
//! Synthesis takes a full spectrum `Yˡₘₙ` to samples `Σ Y e^{i(mα+nγ)} dˡ₋ₘ,₋ₙ(β)`;
//! analysis extracts the single coefficient column `n = −q` of a sampled signal,
//! using sine-series weights in β. Both are fused per `(m, n)` so the adjoints are
//! plain conjugate transposes of small dense stages plus FFTs.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use so3eq_core::signals::EulerGrid;
use so3eq_core::so3fft::{dst_weights, BetaTable};
use so3eq_core::wigner::{spectrum_offset, wigner_deltas};

use crate::features::{column_index, column_len};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[inline]
fn spectral_index(l: usize, m: i32, n: i32) -> usize {
    let li = l as i32;
    spectrum_offset(l) + ((m + li) as usize) * (2 * l + 1) + (n + li) as usize
}

#[inline]
fn bin(freq: i32, n: usize) -> usize {
    freq.rem_euclid(n as i32) as usize
}

/// Work buffers reused across [`LayerGrid`] calls.
#[derive(Debug, Default)]
pub struct Scratch {
    p: Vec<Complex64>,
    r: Vec<Complex64>,
    slice: Vec<Complex64>,
}

/// Precomputed tables for one `(band limit, grid)` pair.
#[derive(Clone)]
pub struct LayerGrid {
    band_limit: usize,
    grid: EulerGrid,
    /// `dˡ₋ₘ,₋ₙ(β_k)` stored contiguously in `k` for each spectral index `(l, m, n)`.
    rows: Vec<f64>,
    /// `q_k sin β_k / 2`, zero on the poles.
    quad: Vec<f64>,
    fft_alpha: Arc<dyn Fft<f64>>,
    ifft_alpha: Arc<dyn Fft<f64>>,
    fft_gamma: Arc<dyn Fft<f64>>,
    ifft_gamma: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for LayerGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LayerGrid")
            .field("band_limit", &self.band_limit)
            .field("grid", &self.grid)
            .finish_non_exhaustive()
    }
}

impl LayerGrid {
    /// Tables for spectra of band limit `band_limit` sampled on `grid`.
    ///
    /// The analysis is exact for band-limited input when `n_alpha ≥ 2L+1` and
    /// `n_beta ≥ 2L+3`; finer grids reduce aliasing of non-band-limited signals.
    pub fn new(band_limit: usize, grid: EulerGrid) -> Self {
        let table = BetaTable::new(band_limit, &grid, &wigner_deltas(band_limit));
        let mut rows = vec![0.0; spectrum_offset(band_limit + 1) * grid.n_beta];
        for l in 0..=band_limit {
            let li = l as i32;
            for m in -li..=li {
                for n in -li..=li {
                    let at = spectral_index(l, m, n) * grid.n_beta;
                    for (k, r) in rows[at..at + grid.n_beta].iter_mut().enumerate() {
                        *r = table.d(k, l, -m, -n);
                    }
                }
            }
        }
        let q = dst_weights(grid.n_beta);
        let quad = (0..grid.n_beta).map(|k| 0.5 * q[k] * grid.beta(k).sin()).collect();
        let mut planner = FftPlanner::new();
        LayerGrid {
            band_limit,
            grid,
            rows,
            quad,
            fft_alpha: planner.plan_fft_forward(grid.n_alpha),
            ifft_alpha: planner.plan_fft_inverse(grid.n_alpha),
            fft_gamma: planner.plan_fft_forward(grid.n_gamma),
            ifft_gamma: planner.plan_fft_inverse(grid.n_gamma),
        }
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    #[inline]
    fn row(&self, l: usize, m: i32, n: i32) -> &[f64] {
        let nb = self.grid.n_beta;
        &self.rows[spectral_index(l, m, n) * nb..][..nb]
    }

    pub fn grid(&self) -> &EulerGrid {
        &self.grid
    }

    /// Samples of the spectrum `y` (full layout, band limit `L`) on the grid.
    pub fn synthesize(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut out = Vec::new();
        self.synthesize_into(y, &mut out, &mut Scratch::default());
        out
    }

    /// [`LayerGrid::synthesize`] into a caller-owned buffer. Reusing `out` and
    /// `scratch` across calls avoids faulting in fresh pages for every channel,
    /// which otherwise costs about as much as the FFTs on fine grids.
    pub fn synthesize_into(&self, y: &[Complex64], out: &mut Vec<Complex64>, scratch: &mut Scratch) {
        let g = self.grid;
        let li = self.band_limit as i32;
        self.alpha_stage(y, scratch);
        let r = &scratch.r;
        // then one batch of γ transforms over contiguous output rows
        out.resize(g.len(), ZERO);
        let plane = g.n_beta * g.n_alpha;
        for k in 0..g.n_beta {
            for j in 0..g.n_alpha {
                let dst = &mut out[g.index(j, k, 0)..][..g.n_gamma];
                dst.fill(ZERO);
                let at = k * g.n_alpha + j;
                for n in -li..=li {
                    dst[bin(n, g.n_gamma)] = r[(n + li) as usize * plane + at];
                }
            }
        }
        self.ifft_gamma.process(out);
    }

    /// β and α stages of the synthesis into `scratch.r[(n, k), j]`.
    fn alpha_stage(&self, y: &[Complex64], scratch: &mut Scratch) {
        let g = self.grid;
        let l_max = self.band_limit;
        let li = l_max as i32;
        let nb = 2 * l_max + 1;
        // p[(m, n), k]
        let p = &mut scratch.p;
        p.clear();
        p.resize(nb * nb * g.n_beta, ZERO);
        for l in 0..=l_max {
            let lw = l as i32;
            let block = &y[spectrum_offset(l)..][..(2 * l + 1) * (2 * l + 1)];
            for m in -lw..=lw {
                for n in -lw..=lw {
                    let c = block[(m + lw) as usize * (2 * l + 1) + (n + lw) as usize];
                    if c == ZERO {
                        continue;
                    }
                    let row = &mut p[((m + li) as usize * nb + (n + li) as usize) * g.n_beta..][..g.n_beta];
                    for (r, d) in row.iter_mut().zip(self.row(l, m, n)) {
                        *r += c * d;
                    }
                }
            }
        }
        // α first while only 2L+1 values of n are live: r[(n, k), j]
        let r = &mut scratch.r;
        r.clear();
        r.resize(nb * g.n_beta * g.n_alpha, ZERO);
        for (n, block) in r.chunks_mut(g.n_beta * g.n_alpha).enumerate() {
            for k in 0..g.n_beta {
                let dst = &mut block[k * g.n_alpha..][..g.n_alpha];
                for m in -li..=li {
                    dst[bin(m, g.n_alpha)] = p[((m + li) as usize * nb + n) * g.n_beta + k];
                }
            }
            self.ifft_alpha.process(block);
        }
    }

    /// Adjoint of [`LayerGrid::synthesize`].
    pub fn synthesize_adjoint(&self, gz: &[Complex64]) -> Vec<Complex64> {
        self.synthesize_adjoint_with(gz.to_vec(), &mut Scratch::default())
    }

    /// [`LayerGrid::synthesize_adjoint`] that consumes `gz` as its work buffer.
    pub fn synthesize_adjoint_with(&self, mut gz: Vec<Complex64>, scratch: &mut Scratch) -> Vec<Complex64> {
        let g = self.grid;
        let l_max = self.band_limit;
        let li = l_max as i32;
        let nb = 2 * l_max + 1;
        self.fft_gamma.process(&mut gz);
        // r[(n, k), j]
        let plane = g.n_beta * g.n_alpha;
        let r = &mut scratch.r;
        r.clear();
        r.resize(nb * plane, ZERO);
        for k in 0..g.n_beta {
            for j in 0..g.n_alpha {
                let src = &gz[g.index(j, k, 0)..][..g.n_gamma];
                let at = k * g.n_alpha + j;
                for n in -li..=li {
                    r[(n + li) as usize * plane + at] = src[bin(n, g.n_gamma)];
                }
            }
        }
        let p = &mut scratch.p;
        p.clear();
        p.resize(nb * nb * g.n_beta, ZERO);
        for (n, block) in r.chunks_mut(plane).enumerate() {
            self.fft_alpha.process(block);
            for k in 0..g.n_beta {
                let src = &block[k * g.n_alpha..][..g.n_alpha];
                for m in -li..=li {
                    p[((m + li) as usize * nb + n) * g.n_beta + k] = src[bin(m, g.n_alpha)];
                }
            }
        }
        let mut out = vec![ZERO; spectrum_offset(l_max + 1)];
        for l in 0..=l_max {
            let lw = l as i32;
            let dim = 2 * l + 1;
            let base = spectrum_offset(l);
            for m in -lw..=lw {
                for n in -lw..=lw {
                    let row = &p[((m + li) as usize * nb + (n + li) as usize) * g.n_beta..][..g.n_beta];
                    let mut acc = ZERO;
                    for (r, d) in row.iter().zip(self.row(l, m, n)) {
                        acc += r * d;
                    }
                    out[base + (m + lw) as usize * dim + (n + lw) as usize] = acc;
                }
            }
        }
        out
    }

    /// Coefficient column `n = −q` (degrees `|q| ≤ l ≤ L`) of sampled values.
    pub fn analyze_column(&self, a: &[Complex64], q: i32) -> Vec<Complex64> {
        let g = self.grid;
        let phase = self.phase(q);
        let mut b = vec![ZERO; (2 * self.band_limit + 1) * g.n_beta];
        let mut buf = vec![ZERO; g.n_alpha];
        for k in 1..g.n_beta - 1 {
            self.analyze_slice(&a[g.index(0, k, 0)..], g.n_beta * g.n_gamma, k, &phase, &mut buf, &mut b);
        }
        self.column_from_slices(&b, q)
    }

    /// `analyze_column(act(synthesize(y)), q)` one β slice at a time, so the
    /// full grid never materializes. The poles carry no quadrature weight and
    /// are skipped.
    pub fn synthesize_activate_column(
        &self,
        y: &[Complex64],
        act: impl Fn(Complex64) -> Complex64,
        q: i32,
        scratch: &mut Scratch,
    ) -> Vec<Complex64> {
        let g = self.grid;
        let li = self.band_limit as i32;
        let nb = 2 * self.band_limit + 1;
        self.alpha_stage(y, scratch);
        let plane = g.n_beta * g.n_alpha;
        let phase = self.phase(q);
        let mut b = vec![ZERO; nb * g.n_beta];
        let mut buf = vec![ZERO; g.n_alpha];
        let slice = &mut scratch.slice;
        slice.resize(g.n_alpha * g.n_gamma, ZERO);
        for k in 1..g.n_beta - 1 {
            for (j, dst) in slice.chunks_mut(g.n_gamma).enumerate() {
                dst.fill(ZERO);
                let at = k * g.n_alpha + j;
                for n in -li..=li {
                    dst[bin(n, g.n_gamma)] = scratch.r[(n + li) as usize * plane + at];
                }
            }
            self.ifft_gamma.process(slice);
            for v in slice.iter_mut() {
                *v = act(*v);
            }
            self.analyze_slice(slice, g.n_gamma, k, &phase, &mut buf, &mut b);
        }
        self.column_from_slices(&b, q)
    }

    fn phase(&self, q: i32) -> Vec<Complex64> {
        let g = self.grid;
        (0..g.n_gamma)
            .map(|i| Complex64::from_polar(1.0 / g.n_gamma as f64, q as f64 * g.gamma(i)))
            .collect()
    }

    /// Fills `b[m, k]` from the γ rows at `β_k`, row `j` starting at `j · stride`.
    fn analyze_slice(
        &self,
        a: &[Complex64],
        stride: usize,
        k: usize,
        phase: &[Complex64],
        buf: &mut [Complex64],
        b: &mut [Complex64],
    ) {
        let g = self.grid;
        let li = self.band_limit as i32;
        for (j, v) in buf.iter_mut().enumerate() {
            let row = &a[j * stride..][..g.n_gamma];
            *v = row.iter().zip(phase).map(|(x, p)| x * p).sum();
        }
        self.fft_alpha.process(buf);
        let inv_a = 1.0 / g.n_alpha as f64;
        for m in -li..=li {
            b[(m + li) as usize * g.n_beta + k] = buf[bin(m, g.n_alpha)] * inv_a;
        }
    }

    fn column_from_slices(&self, b: &[Complex64], q: i32) -> Vec<Complex64> {
        let g = self.grid;
        let l_max = self.band_limit;
        let li = l_max as i32;
        let mut out = vec![ZERO; column_len(l_max, q)];
        for l in q.unsigned_abs() as usize..=l_max {
            let lw = l as i32;
            let w = (2 * l + 1) as f64;
            for m in -lw..=lw {
                let row = &b[(m + li) as usize * g.n_beta..][..g.n_beta];
                let d = self.row(l, m, -q);
                let mut acc = ZERO;
                for k in 1..g.n_beta - 1 {
                    acc += row[k] * (self.quad[k] * d[k]);
                }
                out[column_index(q, l, m)] = acc * w;
            }
        }
        out
    }

    /// Adjoint of [`LayerGrid::analyze_column`].
    pub fn analyze_column_adjoint(&self, gc: &[Complex64], q: i32) -> Vec<Complex64> {
        let g = self.grid;
        let l_max = self.band_limit;
        let li = l_max as i32;
        let nb = 2 * l_max + 1;
        let mut b = vec![ZERO; nb * g.n_beta];
        for l in q.unsigned_abs() as usize..=l_max {
            let lw = l as i32;
            let w = (2 * l + 1) as f64;
            for m in -lw..=lw {
                let c = gc[column_index(q, l, m)] * w;
                if c == ZERO {
                    continue;
                }
                let row = &mut b[(m + li) as usize * g.n_beta..][..g.n_beta];
                let d = self.row(l, m, -q);
                for k in 1..g.n_beta - 1 {
                    row[k] += c * (self.quad[k] * d[k]);
                }
            }
        }
        let phase: Vec<Complex64> = (0..g.n_gamma)
            .map(|i| Complex64::from_polar(1.0 / g.n_gamma as f64, -(q as f64) * g.gamma(i)))
            .collect();
        let inv_a = 1.0 / g.n_alpha as f64;
        let mut out = vec![ZERO; g.len()];
        let mut buf = vec![ZERO; g.n_alpha];
        for k in 1..g.n_beta - 1 {
            buf.fill(ZERO);
            for m in -li..=li {
                buf[bin(m, g.n_alpha)] += b[(m + li) as usize * g.n_beta + k] * inv_a;
            }
            self.ifft_alpha.process(&mut buf);
            for (j, h) in buf.iter().enumerate() {
                let row = &mut out[g.index(j, k, 0)..][..g.n_gamma];
                for (o, p) in row.iter_mut().zip(&phase) {
                    *o = h * p;
                }
            }
        }
        out
    }
}

/// Values at `γ = 0` on the lat/lon nodes `(β_k, α_j)` of a column of order `q`:
/// `E(α, β) = Σ cˡₘ e^{imα} dˡ₋ₘ,q(β)`, stored latitude-major.
#[derive(Clone)]
pub struct SphereSynth {
    band_limit: usize,
    order: i32,
    n_lat: usize,
    n_lon: usize,
    table: BetaTable,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SphereSynth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SphereSynth")
            .field("band_limit", &self.band_limit)
            .field("order", &self.order)
            .field("n_lat", &self.n_lat)
            .field("n_lon", &self.n_lon)
            .finish_non_exhaustive()
    }
}

impl SphereSynth {
    pub fn new(band_limit: usize, order: i32, n_lat: usize, n_lon: usize) -> Self {
        let betas: Vec<f64> = (0..n_lat)
            .map(|k| std::f64::consts::PI * k as f64 / (n_lat - 1) as f64)
            .collect();
        let table = BetaTable::at(band_limit, &betas, &wigner_deltas(band_limit));
        let mut planner = FftPlanner::new();
        SphereSynth {
            band_limit,
            order,
            n_lat,
            n_lon,
            table,
            fft: planner.plan_fft_forward(n_lon),
            ifft: planner.plan_fft_inverse(n_lon),
        }
    }

    pub fn n_lat(&self) -> usize {
        self.n_lat
    }

    pub fn n_lon(&self) -> usize {
        self.n_lon
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn colatitude(&self, k: usize) -> f64 {
        self.table.beta(k)
    }

    pub fn synthesize(&self, c: &[Complex64]) -> Vec<Complex64> {
        let li = self.band_limit as i32;
        let q = self.order;
        let mut out = vec![ZERO; self.n_lat * self.n_lon];
        let mut buf = vec![ZERO; self.n_lon];
        for k in 0..self.n_lat {
            buf.fill(ZERO);
            for m in -li..=li {
                let mut acc = ZERO;
                for l in (m.unsigned_abs() as usize).max(q.unsigned_abs() as usize)..=self.band_limit {
                    acc += c[column_index(q, l, m)] * self.table.d(k, l, -m, q);
                }
                buf[bin(m, self.n_lon)] += acc;
            }
            self.ifft.process(&mut buf);
            out[k * self.n_lon..][..self.n_lon].copy_from_slice(&buf);
        }
        out
    }

    pub fn synthesize_adjoint(&self, g: &[Complex64]) -> Vec<Complex64> {
        let li = self.band_limit as i32;
        let q = self.order;
        let mut out = vec![ZERO; column_len(self.band_limit, q)];
        let mut buf = vec![ZERO; self.n_lon];
        for k in 0..self.n_lat {
            buf.copy_from_slice(&g[k * self.n_lon..][..self.n_lon]);
            self.fft.process(&mut buf);
            for m in -li..=li {
                let v = buf[bin(m, self.n_lon)];
                for l in (m.unsigned_abs() as usize).max(q.unsigned_abs() as usize)..=self.band_limit {
                    out[column_index(q, l, m)] += v * self.table.d(k, l, -m, q);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use so3eq_core::signals::SpectralSignal;
    use so3eq_core::so3fft::{ft_direct, ift_direct};

    fn noise(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect()
    }

    fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
    }

    #[test]
    fn synthesis_matches_direct() {
        let l = 5;
        let grid = EulerGrid::new(13, 15, 12).unwrap();
        let lg = LayerGrid::new(l, grid);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = SpectralSignal::from_coeffs(l, noise(spectrum_offset(l + 1), &mut rng)).unwrap();
        let fast = lg.synthesize(y.coeffs());
        let direct = ift_direct(&y, &grid);
        let err = fast.iter().zip(direct.samples()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn analysis_matches_direct_column() {
        let l = 5;
        let grid = EulerGrid::for_band_limit(l);
        let lg = LayerGrid::new(l, grid);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y = SpectralSignal::from_coeffs(l, noise(spectrum_offset(l + 1), &mut rng)).unwrap();
        let x = ift_direct(&y, &grid);
        let full = ft_direct(&x, l).unwrap();
        for q in [-1, 0, 1, 2] {
            let col = lg.analyze_column(x.samples(), q);
            for deg in q.unsigned_abs() as usize..=l {
                let lw = deg as i32;
                for m in -lw..=lw {
                    assert!((col[column_index(q, deg, m)] - full.get(deg, m, -q)).norm() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn fused_path_matches_separate_steps() {
        let l = 4;
        let grid = EulerGrid::new(11, 13, 10).unwrap();
        let lg = LayerGrid::new(l, grid);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut scratch = Scratch::default();
        let act = |v: Complex64| Complex64::new(v.re.max(0.1 * v.re), v.im.max(0.1 * v.im));
        for q in [-1, 0, 2] {
            let y = noise(spectrum_offset(l + 1), &mut rng);
            let a: Vec<Complex64> = lg.synthesize(&y).into_iter().map(act).collect();
            let sep = lg.analyze_column(&a, q);
            let fused = lg.synthesize_activate_column(&y, act, q, &mut scratch);
            let err = sep.iter().zip(&fused).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-13, "q={q}: {err}");
        }
    }

    #[test]
    fn adjoint_dot_products() {
        let l = 4;
        let grid = EulerGrid::new(11, 13, 10).unwrap();
        let lg = LayerGrid::new(l, grid);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y = noise(spectrum_offset(l + 1), &mut rng);
        let z = noise(grid.len(), &mut rng);
        let lhs = dot(&lg.synthesize(&y), &z);
        let rhs = dot(&y, &lg.synthesize_adjoint(&z));
        assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
        for q in [0, 1] {
            let c = noise(column_len(l, q), &mut rng);
            let lhs = dot(&lg.analyze_column(&z, q), &c);
            let rhs = dot(&z, &lg.analyze_column_adjoint(&c, q));
            assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
            let ss = SphereSynth::new(l, q, 9, 10);
            let e = noise(90, &mut rng);
            let lhs = dot(&ss.synthesize(&c), &e);
            let rhs = dot(&c, &ss.synthesize_adjoint(&e));
            assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn sphere_synth_reads_gamma_zero() {
        let l = 4;
        let grid = EulerGrid::for_band_limit(l);
        let s = SpectralSignal::from_column(l, 1, |deg, m| Complex64::new(deg as f64 - 1.5, m as f64 * 0.3));
        let x = ift_direct(&s, &grid);
        let c: Vec<Complex64> = crate::features::Features::from_spectrum(&s, 1).unwrap().channel(0).to_vec();
        let ss = SphereSynth::new(l, 1, grid.n_beta, grid.n_alpha);
        let e = ss.synthesize(&c);
        for k in 0..grid.n_beta {
            for j in 0..grid.n_alpha {
                assert!((e[k * grid.n_alpha + j] - x.get(j, k, 0)).norm() < 1e-12);
            }
        }
    }
}
