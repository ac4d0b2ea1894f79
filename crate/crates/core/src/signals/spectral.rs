use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::wigner::{spectrum_offset, BandLimit};

/// Coefficient column holding a signal of equivariance order `p`.
///
/// Under `x = Σ x̂ˡ₋ₘ,₋ₙ Dˡₘₙ` the functions of `X_p` (right character `e^{ipθ}`)
/// are spanned by `Dˡₘ,ₚ`, whose coefficients sit in column `n = -p`.
#[inline]
pub fn column_of_order(p: i32) -> i32 {
    -p
}

/// Ragged spectrum `x̂ˡₘₙ`, `0 ≤ l ≤ L`, `-l ≤ m, n ≤ l`, stored `l`-major, then `m`,
/// then `n`.
///
/// The optional `order` tag records membership in `X_p`; it is metadata checked
/// on demand by [`SpectralSignal::verify_order`], never trusted silently.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSignal {
    band_limit: usize,
    coeffs: Vec<Complex64>,
    order: Option<i32>,
}

impl SpectralSignal {
    pub fn zeros(band_limit: usize) -> Self {
        SpectralSignal {
            band_limit,
            coeffs: vec![Complex64::new(0.0, 0.0); BandLimit(band_limit).spectrum_len()],
            order: None,
        }
    }

    pub fn from_coeffs(band_limit: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let expected = BandLimit(band_limit).spectrum_len();
        if coeffs.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "spectrum of band limit {band_limit} needs {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(SpectralSignal {
            band_limit,
            coeffs,
            order: None,
        })
    }

    /// Builds a signal in `X_p` from a closure over `(l, m)`; off-column entries are zero.
    pub fn from_column(band_limit: usize, order: i32, mut f: impl FnMut(usize, i32) -> Complex64) -> Self {
        let mut out = SpectralSignal::zeros(band_limit);
        let n = column_of_order(order);
        for l in n.unsigned_abs() as usize..=band_limit {
            let li = l as i32;
            for m in -li..=li {
                out.set(l, m, n, f(l, m));
            }
        }
        out.order = Some(order);
        out
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn order(&self) -> Option<i32> {
        self.order
    }

    /// Tags the signal as a member of `X_p` without checking.
    pub fn with_order(mut self, order: Option<i32>) -> Self {
        self.order = order;
        self
    }

    pub fn set_order(&mut self, order: Option<i32>) {
        self.order = order;
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    #[inline]
    pub fn index(&self, l: usize, m: i32, n: i32) -> usize {
        debug_assert!(l <= self.band_limit);
        debug_assert!(m.unsigned_abs() as usize <= l && n.unsigned_abs() as usize <= l);
        let dim = 2 * l + 1;
        spectrum_offset(l) + (m + l as i32) as usize * dim + (n + l as i32) as usize
    }

    #[inline]
    pub fn get(&self, l: usize, m: i32, n: i32) -> Complex64 {
        self.coeffs[self.index(l, m, n)]
    }

    #[inline]
    pub fn set(&mut self, l: usize, m: i32, n: i32, v: Complex64) {
        let i = self.index(l, m, n);
        self.coeffs[i] = v;
    }

    /// The `(2l+1)²` block of degree `l`, `m`-major.
    pub fn degree_block(&self, l: usize) -> &[Complex64] {
        let start = spectrum_offset(l);
        &self.coeffs[start..start + (2 * l + 1) * (2 * l + 1)]
    }

    pub fn degree_block_mut(&mut self, l: usize) -> &mut [Complex64] {
        let start = spectrum_offset(l);
        &mut self.coeffs[start..start + (2 * l + 1) * (2 * l + 1)]
    }

    /// Parseval inner product `⟨x, y⟩ = Σ x̂ conj(ŷ)/(2l+1)`.
    pub fn inner(&self, other: &SpectralSignal) -> Result<Complex64> {
        self.check_band(other)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for l in 0..=self.band_limit {
            let w = 1.0 / (2 * l + 1) as f64;
            let s: Complex64 = self
                .degree_block(l)
                .iter()
                .zip(other.degree_block(l))
                .map(|(a, b)| a * b.conj())
                .sum();
            acc += s * w;
        }
        Ok(acc)
    }

    /// `‖x‖² = Σ |x̂|²/(2l+1)`, equal to the Haar `L²` norm of the signal.
    pub fn norm_sq(&self) -> f64 {
        (0..=self.band_limit)
            .map(|l| {
                self.degree_block(l).iter().map(|c| c.norm_sqr()).sum::<f64>() / (2 * l + 1) as f64
            })
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Plain Euclidean distance between coefficient vectors.
    pub fn max_abs_diff(&self, other: &SpectralSignal) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖x − y‖ / ‖y‖` in the coefficient 2-norm.
    pub fn relative_error(&self, reference: &SpectralSignal) -> f64 {
        let num: f64 = self
            .coeffs
            .iter()
            .zip(&reference.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = reference.coeffs.iter().map(|c| c.norm_sqr()).sum();
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }

    /// Largest coefficient magnitude outside column `-p`.
    pub fn off_column_residue(&self, order: i32) -> f64 {
        let col = column_of_order(order);
        let mut worst = 0.0f64;
        for l in 0..=self.band_limit {
            let li = l as i32;
            for m in -li..=li {
                for n in -li..=li {
                    if n != col {
                        worst = worst.max(self.get(l, m, n).norm());
                    }
                }
            }
        }
        worst
    }

    /// Checks membership in `X_p` (off-column coefficients at most `tol` relative to
    /// the largest coefficient) and tags the signal on success.
    pub fn verify_order(&mut self, order: i32, tol: f64) -> Result<()> {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
        let residue = self.off_column_residue(order);
        if residue > tol * scale {
            return Err(Error::NotInSubspace { order, residue });
        }
        self.order = Some(order);
        Ok(())
    }

    pub fn check_band(&self, other: &SpectralSignal) -> Result<()> {
        if self.band_limit != other.band_limit {
            return Err(Error::BandLimitMismatch {
                expected: self.band_limit,
                found: other.band_limit,
            });
        }
        Ok(())
    }

    pub fn scale(&mut self, factor: f64) {
        for c in &mut self.coeffs {
            *c *= factor;
        }
    }

    pub fn add_assign(&mut self, other: &SpectralSignal) -> Result<()> {
        self.check_band(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        if self.order != other.order {
            self.order = None;
        }
        Ok(())
    }

    pub fn sub(&self, other: &SpectralSignal) -> Result<SpectralSignal> {
        self.check_band(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(SpectralSignal {
            band_limit: self.band_limit,
            coeffs,
            order: if self.order == other.order { self.order } else { None },
        })
    }
}
