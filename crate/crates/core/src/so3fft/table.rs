use std::sync::Arc;

use crate::signals::EulerGrid;
use crate::wigner::{spectrum_offset, wigner_d_with, WignerDelta};

/// `dˡ(β_k)` for every β node of a grid and every degree `l ≤ L`.
///
/// Layout: node-major, then the ragged `l`-major block of each degree.
#[derive(Debug, Clone)]
pub struct BetaTable {
    band_limit: usize,
    n_beta: usize,
    betas: Vec<f64>,
    per_node: usize,
    values: Vec<f64>,
}

impl BetaTable {
    pub fn new(band_limit: usize, grid: &EulerGrid, deltas: &[Arc<WignerDelta>]) -> Self {
        let betas: Vec<f64> = (0..grid.n_beta).map(|k| grid.beta(k)).collect();
        Self::at(band_limit, &betas, deltas)
    }

    /// Table at arbitrary angles.
    pub fn at(band_limit: usize, betas: &[f64], deltas: &[Arc<WignerDelta>]) -> Self {
        let per_node = spectrum_offset(band_limit + 1);
        let mut values = Vec::with_capacity(per_node * betas.len());
        for &b in betas {
            for delta in deltas.iter().take(band_limit + 1) {
                let d = wigner_d_with(delta, b);
                // row-major (m, n)
                let dim = d.nrows();
                for r in 0..dim {
                    for c in 0..dim {
                        values.push(d[(r, c)]);
                    }
                }
            }
        }
        BetaTable {
            band_limit,
            n_beta: betas.len(),
            betas: betas.to_vec(),
            per_node,
            values,
        }
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn n_beta(&self) -> usize {
        self.n_beta
    }

    pub fn beta(&self, k: usize) -> f64 {
        self.betas[k]
    }

    /// `dˡₘₙ(β_k)`.
    #[inline]
    pub fn d(&self, k: usize, l: usize, m: i32, n: i32) -> f64 {
        let dim = 2 * l + 1;
        let li = l as i32;
        self.values[k * self.per_node
            + spectrum_offset(l)
            + (m + li) as usize * dim
            + (n + li) as usize]
    }
}
