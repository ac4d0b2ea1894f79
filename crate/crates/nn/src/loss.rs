use num_complex::Complex64;

use crate::error::{NnError, Result};
use crate::features::Features;
use crate::kernels::SphereSynth;

/// Sphere-domain loss and distance between model outputs and targets.
///
/// Each channel is read at `γ = 0` on an equiangular lat/lon grid with
/// `2L+3` colatitudes (poles included) and `2L+2` longitudes. For order-1
/// signals the complex value is `−V + iU`, so `|e|` is the wind-vector error.
#[derive(Debug, Clone)]
pub struct SphereLoss {
    synth: SphereSynth,
    sin: Vec<f64>,
}

impl SphereLoss {
    pub fn new(band_limit: usize, order: i32) -> Self {
        Self::with_grid(band_limit, order, 2 * band_limit + 3, 2 * band_limit + 2)
    }

    pub fn with_grid(band_limit: usize, order: i32, n_lat: usize, n_lon: usize) -> Self {
        let synth = SphereSynth::new(band_limit, order, n_lat, n_lon);
        let sin = (0..n_lat).map(|k| synth.colatitude(k).sin()).collect();
        SphereLoss { synth, sin }
    }

    pub fn synth(&self) -> &SphereSynth {
        &self.synth
    }

    fn check(&self, y: &Features, t: &Features) -> Result<()> {
        y.check_like(t)?;
        if y.band_limit() != self.synth.band_limit() || y.order() != self.synth.order() {
            return Err(NnError::Shape(format!(
                "loss set up for order {} at band limit {}, got order {} at {}",
                self.synth.order(),
                self.synth.band_limit(),
                y.order(),
                y.band_limit()
            )));
        }
        Ok(())
    }

    fn errors(&self, y: &Features, t: &Features, c: usize) -> Vec<Complex64> {
        let diff: Vec<Complex64> = y.channel(c).iter().zip(t.channel(c)).map(|(a, b)| a - b).collect();
        self.synth.synthesize(&diff)
    }

    /// `Σ sin²β |e|²` over nodes and channels.
    pub fn loss(&self, y: &Features, t: &Features) -> Result<f64> {
        self.check(y, t)?;
        let n_lon = self.synth.n_lon();
        let mut acc = 0.0;
        for c in 0..y.n_channels() {
            let e = self.errors(y, t, c);
            for (k, row) in e.chunks(n_lon).enumerate() {
                acc += self.sin[k] * self.sin[k] * row.iter().map(|v| v.norm_sqr()).sum::<f64>();
            }
        }
        Ok(acc)
    }

    /// Loss and its gradient with respect to `y`.
    pub fn loss_and_grad(&self, y: &Features, t: &Features) -> Result<(f64, Features)> {
        self.check(y, t)?;
        let n_lon = self.synth.n_lon();
        let mut acc = 0.0;
        let mut grad = Vec::with_capacity(y.n_channels());
        for c in 0..y.n_channels() {
            let mut e = self.errors(y, t, c);
            for (k, row) in e.chunks_mut(n_lon).enumerate() {
                let w = self.sin[k] * self.sin[k];
                for v in row {
                    acc += w * v.norm_sqr();
                    *v *= 2.0 * w;
                }
            }
            grad.push(self.synth.synthesize_adjoint(&e));
        }
        Ok((acc, Features::new(y.band_limit(), y.order(), grad)?))
    }

    /// Mean deviation `(1/(n_lat n_lon)) Σ sin β |e|`, summed over channels.
    pub fn distance(&self, y: &Features, t: &Features) -> Result<f64> {
        self.check(y, t)?;
        let n_lon = self.synth.n_lon();
        let mut acc = 0.0;
        for c in 0..y.n_channels() {
            let e = self.errors(y, t, c);
            for (k, row) in e.chunks(n_lon).enumerate() {
                acc += self.sin[k] * row.iter().map(|v| v.norm()).sum::<f64>();
            }
        }
        Ok(acc / (self.synth.n_lat() * n_lon) as f64)
    }
}
