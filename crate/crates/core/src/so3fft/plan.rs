use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::weights::{beta_weights, interval_weights, WeightTable};
use crate::error::{Error, Result};
use crate::signals::{EulerGrid, SpatialSignal, SpectralSignal};
use crate::wigner::{i_pow, sign, wigner_deltas, WignerDelta};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// How the sampled β profile is continued to the full circle before the FFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaExtension {
    /// `x(α, β, γ) = x(α+π, 2π−β, γ+π)`: exact for band-limited signals.
    #[default]
    Torus,
    /// Zero padding on `(π, 2π)`; aliases and is kept only for comparisons.
    Zero,
}

/// Precomputed state for the fast SO(3) transform on one grid.
#[derive(Clone)]
pub struct FftPlan {
    band_limit: usize,
    grid: EulerGrid,
    deltas: Vec<Arc<WignerDelta>>,
    beta_weights: WeightTable,
    interval_weights: WeightTable,
    sin_beta: Vec<f64>,
    extension: BetaExtension,
    fft_alpha: Arc<dyn Fft<f64>>,
    fft_gamma: Arc<dyn Fft<f64>>,
    fft_torus: Arc<dyn Fft<f64>>,
    ifft_alpha: Arc<dyn Fft<f64>>,
    ifft_gamma: Arc<dyn Fft<f64>>,
    ifft_torus: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FftPlan")
            .field("band_limit", &self.band_limit)
            .field("grid", &self.grid)
            .field("extension", &self.extension)
            .finish_non_exhaustive()
    }
}

impl FftPlan {
    pub fn new(band_limit: usize, grid: EulerGrid) -> Result<Self> {
        Self::with_deltas(band_limit, grid, wigner_deltas(band_limit))
    }

    /// Plan on the default grid for `band_limit`.
    pub fn for_band_limit(band_limit: usize) -> Self {
        Self::new(band_limit, EulerGrid::for_band_limit(band_limit)).expect("default grid is valid")
    }

    /// Plan with caller-supplied `Δ` matrices (used to inject faults in self-tests).
    pub fn with_deltas(band_limit: usize, grid: EulerGrid, deltas: Vec<Arc<WignerDelta>>) -> Result<Self> {
        grid.validate(band_limit)?;
        // sin β raises the β degree by one; the torus must resolve degree L+1
        if grid.torus_beta_len() < 2 * band_limit + 3 {
            return Err(grid.too_coarse(band_limit));
        }
        if deltas.len() <= band_limit {
            return Err(Error::InvalidArgument(format!(
                "{} delta matrices supplied for band limit {band_limit}",
                deltas.len()
            )));
        }
        let n_torus = grid.torus_beta_len();
        let mut planner = FftPlanner::new();
        let sin_beta = (0..grid.n_beta)
            .map(|k| {
                if k == 0 || k == grid.n_beta - 1 {
                    0.0
                } else {
                    grid.beta(k).sin()
                }
            })
            .collect();
        Ok(FftPlan {
            band_limit,
            grid,
            beta_weights: beta_weights(2 * band_limit + 1),
            interval_weights: interval_weights(n_torus / 2 + band_limit + 1),
            sin_beta,
            extension: BetaExtension::Torus,
            fft_alpha: planner.plan_fft_forward(grid.n_alpha),
            fft_gamma: planner.plan_fft_forward(grid.n_gamma),
            fft_torus: planner.plan_fft_forward(n_torus),
            ifft_alpha: planner.plan_fft_inverse(grid.n_alpha),
            ifft_gamma: planner.plan_fft_inverse(grid.n_gamma),
            ifft_torus: planner.plan_fft_inverse(n_torus),
            deltas,
        })
    }

    pub fn with_extension(mut self, extension: BetaExtension) -> Self {
        self.extension = extension;
        self
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn grid(&self) -> &EulerGrid {
        &self.grid
    }

    pub fn deltas(&self) -> &[Arc<WignerDelta>] {
        &self.deltas
    }

    /// Closed-form `(1/2π)∫₀^π e^{ikβ} sin β dβ` for `|k| ≤ 2L+1`.
    pub fn beta_weights(&self) -> &WeightTable {
        &self.beta_weights
    }

    pub fn forward(&self, x: &SpatialSignal) -> Result<SpectralSignal> {
        ft_fast(x, self)
    }

    pub fn inverse(&self, xhat: &SpectralSignal) -> Result<SpatialSignal> {
        ift_fast(xhat, self)
    }
}

#[inline]
fn bin(freq: i32, n: usize) -> usize {
    freq.rem_euclid(n as i32) as usize
}

/// Fast forward transform: FFTs in `γ` and `α`, the `sin β` integral as an exact
/// convolution on the β torus, then the `Δ` contraction
/// `x̂ˡₘₙ = (−1)^{m+n} i^{m−n} π(2l+1) Σₛ Δˡₛₘ Δˡₛₙ x^ext_{m,s,n}`.
///
/// The pole rows carry zero Haar weight and are never read.
pub fn ft_fast(x: &SpatialSignal, plan: &FftPlan) -> Result<SpectralSignal> {
    let g = plan.grid;
    if *x.grid() != g {
        return Err(Error::GridMismatch(format!(
            "signal grid {:?} does not match plan grid {:?}",
            x.grid(),
            g
        )));
    }
    let l_max = plan.band_limit;
    let li = l_max as i32;
    let nb = 2 * l_max + 1;
    let n_torus = g.torus_beta_len();

    // γ stage: a[(j, k), n]
    let mut a = vec![ZERO; g.n_alpha * g.n_beta * nb];
    let mut buf = vec![ZERO; g.n_gamma];
    let inv_g = 1.0 / g.n_gamma as f64;
    for j in 0..g.n_alpha {
        for k in 1..g.n_beta - 1 {
            let start = g.index(j, k, 0);
            buf.copy_from_slice(&x.samples()[start..start + g.n_gamma]);
            plan.fft_gamma.process(&mut buf);
            let row = (j * g.n_beta + k) * nb;
            for n in -li..=li {
                a[row + (n + li) as usize] = buf[bin(n, g.n_gamma)] * inv_g;
            }
        }
    }

    // α stage: prof[(m, n), k]
    let mut prof = vec![ZERO; nb * nb * g.n_beta];
    let mut buf = vec![ZERO; g.n_alpha];
    let inv_a = 1.0 / g.n_alpha as f64;
    for k in 1..g.n_beta - 1 {
        for n in 0..nb {
            for (j, b) in buf.iter_mut().enumerate() {
                *b = a[(j * g.n_beta + k) * nb + n];
            }
            plan.fft_alpha.process(&mut buf);
            for m in -li..=li {
                let mi = (m + li) as usize;
                prof[(mi * nb + n) * g.n_beta + k] = buf[bin(m, g.n_alpha)] * inv_a;
            }
        }
    }

    // β stage: x^ext[(m, n), s] = Σ_{s'} F̂_{s'} h_{s'−s}
    let mut ext = vec![ZERO; nb * nb * nb];
    let mut torus = vec![ZERO; n_torus];
    let inv_t = 1.0 / n_torus as f64;
    let half = (n_torus / 2) as i32;
    for m in -li..=li {
        for n in -li..=li {
            let mn = ((m + li) as usize * nb + (n + li) as usize) * g.n_beta;
            torus.fill(ZERO);
            let parity = -sign(m + n);
            for k in 1..g.n_beta - 1 {
                let f = prof[mn + k] * plan.sin_beta[k];
                torus[k] = f;
                if plan.extension == BetaExtension::Torus {
                    torus[n_torus - k] = f * parity;
                }
            }
            plan.fft_torus.process(&mut torus);
            let out = &mut ext[((m + li) as usize * nb + (n + li) as usize) * nb..][..nb];
            for (b, c) in torus.iter().enumerate() {
                let c = c * inv_t;
                if c == ZERO {
                    continue;
                }
                let b = b as i32;
                let freqs: &[(i32, f64)] = if b < half {
                    &[(b, 1.0)]
                } else if b > half {
                    &[(b - n_torus as i32, 1.0)]
                } else {
                    &[(half, 0.5), (-half, 0.5)]
                };
                for &(sp, wt) in freqs {
                    for s in -li..=li {
                        let h = plan.interval_weights.get((sp - s) as i64);
                        if h != ZERO {
                            out[(s + li) as usize] += c * h * wt;
                        }
                    }
                }
            }
        }
    }

    // Δ contraction
    let mut out = SpectralSignal::zeros(l_max);
    for l in 0..=l_max {
        let delta = &plan.deltas[l];
        let lw = l as i32;
        let scale = PI * (2 * l + 1) as f64;
        for m in -lw..=lw {
            for n in -lw..=lw {
                let e = &ext[((m + li) as usize * nb + (n + li) as usize) * nb..][..nb];
                let mut acc = ZERO;
                for s in -lw..=lw {
                    acc += e[(s + li) as usize] * (delta.get(s, m) * delta.get(s, n));
                }
                out.set(l, m, n, acc * i_pow(m - n) * (sign(m + n) * scale));
            }
        }
    }
    Ok(out)
}

/// Fast synthesis `x = Σ x̂ˡₘₙ e^{i(mα+nγ)} dˡ₋ₘ,₋ₙ(β)` through the three-index torus
/// spectrum `(−1)^{m+n} i^{m−n} Σ_l x̂ˡₘₙ Δˡₛₘ Δˡₛₙ` (coefficient of `e^{−isβ}`) and
/// inverse FFTs.
pub fn ift_fast(xhat: &SpectralSignal, plan: &FftPlan) -> Result<SpatialSignal> {
    let g = plan.grid;
    let l_in = xhat.band_limit();
    if l_in > plan.band_limit {
        return Err(Error::BandLimitMismatch {
            expected: plan.band_limit,
            found: l_in,
        });
    }
    let li = l_in as i32;
    let nb = 2 * l_in + 1;
    let n_torus = g.torus_beta_len();

    // β stage: prof[(m, n), k]
    let mut prof = vec![ZERO; nb * nb * g.n_beta];
    let mut torus = vec![ZERO; n_torus];
    let mut t = vec![ZERO; nb];
    for m in -li..=li {
        for n in -li..=li {
            t.fill(ZERO);
            let lo = m.unsigned_abs().max(n.unsigned_abs()) as usize;
            for l in lo..=l_in {
                let c = xhat.get(l, m, n);
                if c == ZERO {
                    continue;
                }
                let delta = &plan.deltas[l];
                let lw = l as i32;
                for s in -lw..=lw {
                    t[(s + li) as usize] += c * (delta.get(s, m) * delta.get(s, n));
                }
            }
            let phase = i_pow(m - n) * sign(m + n);
            torus.fill(ZERO);
            for s in -li..=li {
                torus[bin(-s, n_torus)] += t[(s + li) as usize] * phase;
            }
            plan.ifft_torus.process(&mut torus);
            let mn = ((m + li) as usize * nb + (n + li) as usize) * g.n_beta;
            prof[mn..mn + g.n_beta].copy_from_slice(&torus[..g.n_beta]);
        }
    }

    // γ stage: y[(m, k), i]
    let mut y = vec![ZERO; nb * g.n_beta * g.n_gamma];
    let mut buf = vec![ZERO; g.n_gamma];
    for m in 0..nb {
        for k in 0..g.n_beta {
            buf.fill(ZERO);
            for n in -li..=li {
                buf[bin(n, g.n_gamma)] += prof[(m * nb + (n + li) as usize) * g.n_beta + k];
            }
            plan.ifft_gamma.process(&mut buf);
            y[(m * g.n_beta + k) * g.n_gamma..][..g.n_gamma].copy_from_slice(&buf);
        }
    }

    // α stage
    let mut out = SpatialSignal::zeros(g);
    let mut buf = vec![ZERO; g.n_alpha];
    for k in 0..g.n_beta {
        for i in 0..g.n_gamma {
            buf.fill(ZERO);
            for m in -li..=li {
                buf[bin(m, g.n_alpha)] += y[(((m + li) as usize) * g.n_beta + k) * g.n_gamma + i];
            }
            plan.ifft_alpha.process(&mut buf);
            for (j, v) in buf.iter().enumerate() {
                out.set(j, k, i, *v);
            }
        }
    }
    Ok(out)
}
