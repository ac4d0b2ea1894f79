use num_complex::Complex64;

use super::table::BetaTable;
use super::weights::dst_weights;
use crate::error::Result;
use crate::signals::{EulerGrid, SpatialSignal, SpectralSignal};
use crate::wigner::{wigner_d, wigner_deltas};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Direct analysis `x̂ˡₘₙ = (2l+1)⟨x, Dˡ₋ₘ,₋ₙ⟩` by quadrature.
///
/// α and γ use plain DFT sums. The β integrand `X(β) dˡ₋ₘ,₋ₙ(β) sin β` is a sine
/// polynomial of degree `≤ 2L+1` for band-limited input, so the interior sine-series
/// weights of [`dst_weights`] integrate it exactly once `n_beta ≥ 2L+3`.
pub fn ft_direct(x: &SpatialSignal, band_limit: usize) -> Result<SpectralSignal> {
    let g = *x.grid();
    g.validate(band_limit)?;
    if g.n_beta < 2 * band_limit + 3 {
        return Err(g.too_coarse(band_limit));
    }
    let li = band_limit as i32;
    let nb = 2 * band_limit + 1;

    // γ sums: a[(j, k), n]
    let gamma_phase: Vec<Complex64> = (-li..=li)
        .flat_map(|n| (0..g.n_gamma).map(move |i| (n, i)))
        .map(|(n, i)| Complex64::from_polar(1.0 / g.n_gamma as f64, -(n as f64) * g.gamma(i)))
        .collect();
    let mut a = vec![ZERO; g.n_alpha * g.n_beta * nb];
    for j in 0..g.n_alpha {
        for k in 0..g.n_beta {
            let row = &x.samples()[g.index(j, k, 0)..][..g.n_gamma];
            for n in 0..nb {
                let ph = &gamma_phase[n * g.n_gamma..][..g.n_gamma];
                a[(j * g.n_beta + k) * nb + n] = row.iter().zip(ph).map(|(v, p)| v * p).sum();
            }
        }
    }

    // α sums: prof[(m, n), k]
    let mut prof = vec![ZERO; nb * nb * g.n_beta];
    for m in -li..=li {
        let mi = (m + li) as usize;
        let ph: Vec<Complex64> = (0..g.n_alpha)
            .map(|j| Complex64::from_polar(1.0 / g.n_alpha as f64, -(m as f64) * g.alpha(j)))
            .collect();
        for k in 0..g.n_beta {
            for n in 0..nb {
                prof[(mi * nb + n) * g.n_beta + k] =
                    (0..g.n_alpha).map(|j| a[(j * g.n_beta + k) * nb + n] * ph[j]).sum();
            }
        }
    }

    let table = BetaTable::new(band_limit, &g, &wigner_deltas(band_limit));
    let q: Vec<f64> = dst_weights(g.n_beta)
        .iter()
        .enumerate()
        .map(|(k, w)| w * g.beta(k).sin())
        .collect();
    let mut out = SpectralSignal::zeros(band_limit);
    for l in 0..=band_limit {
        let lw = l as i32;
        let scale = 0.5 * (2 * l + 1) as f64;
        for m in -lw..=lw {
            for n in -lw..=lw {
                let p = &prof[((m + li) as usize * nb + (n + li) as usize) * g.n_beta..][..g.n_beta];
                let mut acc = ZERO;
                for k in 1..g.n_beta - 1 {
                    acc += p[k] * (q[k] * table.d(k, l, -m, -n));
                }
                out.set(l, m, n, acc * scale);
            }
        }
    }
    Ok(out)
}

/// Pointwise synthesis `x(α, β, γ) = Σ x̂ˡₘₙ Dˡ₋ₘ,₋ₙ(α, β, γ)` on every node.
pub fn ift_direct(xhat: &SpectralSignal, grid: &EulerGrid) -> SpatialSignal {
    let l_max = xhat.band_limit();
    let li = l_max as i32;
    let nb = 2 * l_max + 1;
    let table = BetaTable::new(l_max, grid, &wigner_deltas(l_max));
    let alpha_phase: Vec<Complex64> = (0..grid.n_alpha)
        .flat_map(|j| (-li..=li).map(move |m| (j, m)))
        .map(|(j, m)| Complex64::from_polar(1.0, m as f64 * grid.alpha(j)))
        .collect();
    let gamma_phase: Vec<Complex64> = (0..grid.n_gamma)
        .flat_map(|i| (-li..=li).map(move |n| (i, n)))
        .map(|(i, n)| Complex64::from_polar(1.0, n as f64 * grid.gamma(i)))
        .collect();
    let mut out = SpatialSignal::zeros(*grid);
    let mut p = vec![ZERO; nb * nb];
    for k in 0..grid.n_beta {
        // p[m, n] = Σ_l x̂ˡₘₙ dˡ₋ₘ,₋ₙ(β_k)
        p.fill(ZERO);
        for l in 0..=l_max {
            let lw = l as i32;
            for m in -lw..=lw {
                for n in -lw..=lw {
                    p[(m + li) as usize * nb + (n + li) as usize] +=
                        xhat.get(l, m, n) * table.d(k, l, -m, -n);
                }
            }
        }
        for j in 0..grid.n_alpha {
            let ea = &alpha_phase[j * nb..][..nb];
            for i in 0..grid.n_gamma {
                let eg = &gamma_phase[i * nb..][..nb];
                let mut acc = ZERO;
                for (mi, am) in ea.iter().enumerate() {
                    let row = &p[mi * nb..][..nb];
                    let inner: Complex64 = row.iter().zip(eg).map(|(c, e)| c * e).sum();
                    acc += am * inner;
                }
                out.set(j, k, i, acc);
            }
        }
    }
    out
}

/// Value of the band-limited signal with spectrum `x̂` at the rotation `Z(α)Y(β)Z(γ)`.
pub fn evaluate(xhat: &SpectralSignal, alpha: f64, beta: f64, gamma: f64) -> Complex64 {
    let mut acc = ZERO;
    for l in 0..=xhat.band_limit() {
        let d = wigner_d(l, beta);
        let lw = l as i32;
        for m in -lw..=lw {
            for n in -lw..=lw {
                let c = xhat.get(l, m, n);
                if c == ZERO {
                    continue;
                }
                let dv = d[((lw - m) as usize, (lw - n) as usize)];
                acc += c * Complex64::from_polar(dv, m as f64 * alpha + n as f64 * gamma);
            }
        }
    }
    acc
}
