//! Linear operators acting on spectra.
//!
//! All formulas are per degree `l`; nothing mixes degrees.

mod filter;

pub use filter::{restricted_len, Filter, FilterForm};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signals::{column_of_order, RotationMatrix, SpectralSignal};
use crate::wigner::wigner_D;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative tolerance when an untagged input must be checked for membership in `X_p`.
const ORDER_TOLERANCE: f64 = 1e-8;

fn check_filter_band(x: &SpectralSignal, psi: &Filter) -> Result<()> {
    if x.band_limit() != psi.band_limit() {
        return Err(Error::BandLimitMismatch {
            expected: x.band_limit(),
            found: psi.band_limit(),
        });
    }
    Ok(())
}

/// Left convolution `ŷˡₘₙ = (1/(2l+1)) Σₛ x̂ˡₘₛ conj(ψ̂ˡₙₛ)`.
pub fn conv_left(x: &SpectralSignal, psi: &Filter) -> Result<SpectralSignal> {
    check_filter_band(x, psi)?;
    let mut out = SpectralSignal::zeros(x.band_limit());
    for l in 0..=x.band_limit() {
        let li = l as i32;
        let w = 1.0 / (2 * l + 1) as f64;
        for m in -li..=li {
            for n in -li..=li {
                let acc: Complex64 = (-li..=li).map(|s| x.get(l, m, s) * psi.get(l, n, s).conj()).sum();
                out.set(l, m, n, acc * w);
            }
        }
    }
    Ok(out)
}

fn restricted_order(x: &SpectralSignal, psi: &Filter) -> Result<i32> {
    check_filter_band(x, psi)?;
    let p = match psi.form() {
        FilterForm::Restricted { order } => order,
        FilterForm::Full => {
            return Err(Error::InvalidArgument("expected a restricted filter".into()));
        }
    };
    match x.order() {
        Some(q) if q != p => Err(Error::OrderMismatch { expected: p, found: q }),
        Some(_) => Ok(p),
        None => {
            let mut probe = x.clone();
            probe.verify_order(p, ORDER_TOLERANCE)?;
            Ok(p)
        }
    }
}

fn restricted_product(x: &SpectralSignal, psi: &Filter, p: i32, conjugate: bool) -> SpectralSignal {
    let col = column_of_order(p);
    let mut out = SpectralSignal::zeros(x.band_limit());
    for l in p.unsigned_abs() as usize..=x.band_limit() {
        let li = l as i32;
        let w = 1.0 / (2 * l + 1) as f64;
        for n in -li..=li {
            let f = psi.coeffs()[Filter::restricted_index(p, l, n)];
            let f = if conjugate { f.conj() } else { f } * w;
            for m in -li..=li {
                out.set(l, m, n, x.get(l, m, col) * f);
            }
        }
    }
    out
}

/// `ŷˡₘₙ = (1/(2l+1)) x̂ˡₘ,₋ₚ conj(ψ̂ˡₙ)` for an input in `X_p`.
pub fn conv_left_restricted(x: &SpectralSignal, psi: &Filter) -> Result<SpectralSignal> {
    let p = restricted_order(x, psi)?;
    Ok(restricted_product(x, psi, p, true))
}

/// The learned-layer variant of [`conv_left_restricted`] without the conjugation;
/// it equals [`conv_left_restricted`] applied to the conjugated filter.
pub fn conv_left_learned(x: &SpectralSignal, psi: &Filter) -> Result<SpectralSignal> {
    let p = restricted_order(x, psi)?;
    Ok(restricted_product(x, psi, p, false))
}

/// Right covariance `ŷˡₘₙ = (1/(2l+1)) Σₛ x̂ˡₛₙ conj(ψ̂ˡₛₘ)`; keeps every column in place.
pub fn cov_right(x: &SpectralSignal, psi: &Filter) -> Result<SpectralSignal> {
    check_filter_band(x, psi)?;
    let mut out = SpectralSignal::zeros(x.band_limit());
    for l in 0..=x.band_limit() {
        let li = l as i32;
        let w = 1.0 / (2 * l + 1) as f64;
        for m in -li..=li {
            for n in -li..=li {
                let acc: Complex64 = (-li..=li).map(|s| x.get(l, s, n) * psi.get(l, s, m).conj()).sum();
                out.set(l, m, n, acc * w);
            }
        }
    }
    Ok(out.with_order(x.order()))
}

/// Orthogonal projection onto `X_q`: keeps coefficient column `−q`.
pub fn smooth(x: &SpectralSignal, q: i32) -> Result<SpectralSignal> {
    if q.unsigned_abs() as usize > x.band_limit() {
        return Err(Error::OrderOutOfRange {
            order: q,
            band_limit: x.band_limit(),
        });
    }
    let col = column_of_order(q);
    let mut out = SpectralSignal::zeros(x.band_limit());
    for l in q.unsigned_abs() as usize..=x.band_limit() {
        let li = l as i32;
        for m in -li..=li {
            out.set(l, m, col, x.get(l, m, col));
        }
    }
    Ok(out.with_order(Some(q)))
}

/// Spectral pooling: drops degrees above `l_out`.
pub fn pool(x: &SpectralSignal, l_out: usize) -> Result<SpectralSignal> {
    if l_out > x.band_limit() {
        return Err(Error::InvalidArgument(format!(
            "cannot pool band limit {} up to {l_out}",
            x.band_limit()
        )));
    }
    let len = crate::wigner::BandLimit(l_out).spectrum_len();
    let out = SpectralSignal::from_coeffs(l_out, x.coeffs()[..len].to_vec())?;
    Ok(out.with_order(x.order()))
}

/// Spectral unpooling: zero-pads degrees up to `l_out`.
pub fn unpool(x: &SpectralSignal, l_out: usize) -> Result<SpectralSignal> {
    if l_out < x.band_limit() {
        return Err(Error::InvalidArgument(format!(
            "cannot unpool band limit {} down to {l_out}",
            x.band_limit()
        )));
    }
    let mut coeffs = x.coeffs().to_vec();
    coeffs.resize(crate::wigner::BandLimit(l_out).spectrum_len(), ZERO);
    Ok(SpectralSignal::from_coeffs(l_out, coeffs)?.with_order(x.order()))
}

/// Matrices `bˡₘₙ = Dˡ₋ₘ,₋ₙ(B⁻¹)` for `l ≤ L`, stored row-major per degree.
pub fn rotation_coefficients(b: &RotationMatrix, band_limit: usize) -> Vec<Vec<Complex64>> {
    let (al, be, ga) = b.inverse().to_euler();
    (0..=band_limit)
        .map(|l| {
            let d = wigner_D(l, al, be, ga);
            let dim = 2 * l + 1;
            let mut out = vec![ZERO; dim * dim];
            for r in 0..dim {
                for c in 0..dim {
                    // entry (m, n) reads D at (−m, −n)
                    out[r * dim + c] = d[(dim - 1 - r, dim - 1 - c)];
                }
            }
            out
        })
        .collect()
}

/// Exact left translation `ℓ_B` in coefficients: `ŷˡₘₙ = Σₛ x̂ˡₛₙ bˡₛₘ`.
pub fn rotate_spectral(x: &SpectralSignal, b: &RotationMatrix) -> SpectralSignal {
    let coeffs = rotation_coefficients(b, x.band_limit());
    rotate_with(x, &coeffs)
}

/// [`rotate_spectral`] with precomputed [`rotation_coefficients`].
pub fn rotate_with(x: &SpectralSignal, coeffs: &[Vec<Complex64>]) -> SpectralSignal {
    let mut out = SpectralSignal::zeros(x.band_limit());
    for l in 0..=x.band_limit() {
        let dim = 2 * l + 1;
        let b = &coeffs[l];
        let xb = x.degree_block(l);
        let yb = out.degree_block_mut(l);
        for s in 0..dim {
            for n in 0..dim {
                let v = xb[s * dim + n];
                if v == ZERO {
                    continue;
                }
                for m in 0..dim {
                    yb[m * dim + n] += v * b[s * dim + m];
                }
            }
        }
    }
    out.with_order(x.order())
}
