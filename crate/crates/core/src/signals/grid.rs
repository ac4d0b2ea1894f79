use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Equiangular grid on the Euler angles `(α, β, γ)`.
///
/// `α_j = 2πj/n_alpha`, `γ_i = 2πi/n_gamma` and `β_k = πk/(n_beta − 1)`; the β
/// nodes include both poles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EulerGrid {
    pub n_alpha: usize,
    pub n_beta: usize,
    pub n_gamma: usize,
}

impl EulerGrid {
    pub fn new(n_alpha: usize, n_beta: usize, n_gamma: usize) -> Result<Self> {
        if n_alpha == 0 || n_gamma == 0 || n_beta < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid {n_alpha}x{n_beta}x{n_gamma} needs n_alpha, n_gamma >= 1 and n_beta >= 2"
            )));
        }
        Ok(EulerGrid {
            n_alpha,
            n_beta,
            n_gamma,
        })
    }

    /// Default grid for band limit `L`: `(2L+2) × (2L+3) × (2L+2)`.
    pub fn for_band_limit(band_limit: usize) -> Self {
        EulerGrid {
            n_alpha: 2 * band_limit + 2,
            n_beta: 2 * band_limit + 3,
            n_gamma: 2 * band_limit + 2,
        }
    }

    /// Checks the sampling minima `n_alpha, n_gamma ≥ 2L+1`, `n_beta ≥ 2L+2`.
    pub fn validate(&self, band_limit: usize) -> Result<()> {
        if self.n_alpha < 2 * band_limit + 1
            || self.n_gamma < 2 * band_limit + 1
            || self.n_beta < 2 * band_limit + 2
        {
            return Err(self.too_coarse(band_limit));
        }
        Ok(())
    }

    pub(crate) fn too_coarse(&self, band_limit: usize) -> Error {
        Error::GridTooCoarse {
            n_alpha: self.n_alpha,
            n_beta: self.n_beta,
            n_gamma: self.n_gamma,
            band_limit,
        }
    }

    pub fn len(&self) -> usize {
        self.n_alpha * self.n_beta * self.n_gamma
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn alpha(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_alpha as f64
    }

    #[inline]
    pub fn beta(&self, k: usize) -> f64 {
        PI * k as f64 / (self.n_beta - 1) as f64
    }

    #[inline]
    pub fn gamma(&self, i: usize) -> f64 {
        2.0 * PI * i as f64 / self.n_gamma as f64
    }

    /// Flat index of node `(α_j, β_k, γ_i)`.
    #[inline]
    pub fn index(&self, j: usize, k: usize, i: usize) -> usize {
        (j * self.n_beta + k) * self.n_gamma + i
    }

    /// Number of β samples on the full torus `[0, 2π)` after extension.
    pub fn torus_beta_len(&self) -> usize {
        2 * (self.n_beta - 1)
    }
}
