use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signals::{column_of_order, SpectralSignal};

/// Storage form of a spectral filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterForm {
    /// All coefficients `ψ̂ˡₙₛ`.
    Full,
    /// Only the coefficients `ψ̂ˡₙ` that meet an input of order `p`, i.e. `ψ̂ˡₙ,₋ₚ`.
    Restricted { order: i32 },
}

/// Spectral filter `ψ̂`.
///
/// The restricted form for order `p` stores degrees `|p| ≤ l ≤ L`, each with all
/// `2l+1` values of `n`, for `(L+1)² − p²` entries in total.
#[derive(Debug, Clone, PartialEq)]
pub struct Filter {
    band_limit: usize,
    form: FilterForm,
    coeffs: Vec<Complex64>,
}

/// Number of coefficients of a filter restricted to order `p`.
pub fn restricted_len(band_limit: usize, order: i32) -> usize {
    let p = order.unsigned_abs() as usize;
    if p > band_limit {
        0
    } else {
        (band_limit + 1).pow(2) - p * p
    }
}

impl Filter {
    /// Full filter with the coefficient layout of a spectral signal (`n` as row,
    /// `s` as column).
    pub fn full(psi: SpectralSignal) -> Self {
        Filter {
            band_limit: psi.band_limit(),
            form: FilterForm::Full,
            coeffs: psi.into_coeffs(),
        }
    }

    pub fn restricted(band_limit: usize, order: i32, coeffs: Vec<Complex64>) -> Result<Self> {
        if order.unsigned_abs() as usize > band_limit {
            return Err(Error::OrderOutOfRange { order, band_limit });
        }
        let expected = restricted_len(band_limit, order);
        if coeffs.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "restricted filter of order {order} at band limit {band_limit} needs {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Filter {
            band_limit,
            form: FilterForm::Restricted { order },
            coeffs,
        })
    }

    pub fn restricted_from_fn(
        band_limit: usize,
        order: i32,
        mut f: impl FnMut(usize, i32) -> Complex64,
    ) -> Result<Self> {
        let lo = order.unsigned_abs() as usize;
        let mut coeffs = Vec::with_capacity(restricted_len(band_limit, order));
        for l in lo..=band_limit {
            let li = l as i32;
            for n in -li..=li {
                coeffs.push(f(l, n));
            }
        }
        Filter::restricted(band_limit, order, coeffs)
    }

    /// `ψ̂ˡₙ = (2l+1) δ_{n,−p}`: convolving with it and smoothing at `q = p` is the identity.
    pub fn identity(band_limit: usize, order: i32) -> Result<Self> {
        let col = column_of_order(order);
        Filter::restricted_from_fn(band_limit, order, |l, n| {
            if n == col {
                Complex64::new((2 * l + 1) as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn form(&self) -> FilterForm {
        self.form
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Position of `ψ̂ˡₙ` in a restricted filter of order `p`.
    #[inline]
    pub fn restricted_index(order: i32, l: usize, n: i32) -> usize {
        let p = order.unsigned_abs() as usize;
        l * l - p * p + (n + l as i32) as usize
    }

    /// `ψ̂ˡₙₛ`; a restricted filter reads as zero away from `s = −p`.
    pub fn get(&self, l: usize, n: i32, s: i32) -> Complex64 {
        match self.form {
            FilterForm::Full => {
                let dim = 2 * l + 1;
                let li = l as i32;
                self.coeffs[crate::wigner::spectrum_offset(l) + (n + li) as usize * dim + (s + li) as usize]
            }
            FilterForm::Restricted { order } => {
                if s != column_of_order(order) || (order.unsigned_abs() as usize) > l {
                    Complex64::new(0.0, 0.0)
                } else {
                    self.coeffs[Self::restricted_index(order, l, n)]
                }
            }
        }
    }

    /// The full-form filter with the same action.
    pub fn to_full(&self) -> Filter {
        let mut out = SpectralSignal::zeros(self.band_limit);
        for l in 0..=self.band_limit {
            let li = l as i32;
            for n in -li..=li {
                for s in -li..=li {
                    out.set(l, n, s, self.get(l, n, s));
                }
            }
        }
        Filter::full(out)
    }

    pub fn conj(&self) -> Filter {
        Filter {
            band_limit: self.band_limit,
            form: self.form,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }
}
