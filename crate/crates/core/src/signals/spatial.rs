use num_complex::Complex64;

use super::grid::EulerGrid;
use crate::error::{Error, Result};

/// Complex samples of a function on SO(3) at the nodes of an [`EulerGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialSignal {
    grid: EulerGrid,
    samples: Vec<Complex64>,
}

impl SpatialSignal {
    pub fn zeros(grid: EulerGrid) -> Self {
        SpatialSignal {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn new(grid: EulerGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} nodes",
                samples.len(),
                grid.len()
            )));
        }
        Ok(SpatialSignal { grid, samples })
    }

    /// Samples `f(α, β, γ)` at every node.
    pub fn from_fn(grid: EulerGrid, mut f: impl FnMut(f64, f64, f64) -> Complex64) -> Self {
        let mut samples = Vec::with_capacity(grid.len());
        for j in 0..grid.n_alpha {
            let a = grid.alpha(j);
            for k in 0..grid.n_beta {
                let b = grid.beta(k);
                for i in 0..grid.n_gamma {
                    samples.push(f(a, b, grid.gamma(i)));
                }
            }
        }
        SpatialSignal { grid, samples }
    }

    pub fn grid(&self) -> &EulerGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize, i: usize) -> Complex64 {
        self.samples[self.grid.index(j, k, i)]
    }

    #[inline]
    pub fn set(&mut self, j: usize, k: usize, i: usize, v: Complex64) {
        let idx = self.grid.index(j, k, i);
        self.samples[idx] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &SpatialSignal) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("signals live on different grids".into()));
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}
