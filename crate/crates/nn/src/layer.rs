use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use so3eq_core::signals::EulerGrid;
use so3eq_core::wigner::spectrum_offset;

use crate::activation::Activation;
use crate::error::{NnError, Result};
use crate::features::{column_index, column_len, Features};
use crate::kernels::{LayerGrid, Scratch};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Shape of a convolution layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerSpec {
    pub in_channels: usize,
    pub out_channels: usize,
    pub p: i32,
    pub q: i32,
    pub band_limit: usize,
    pub activation: Activation,
    /// Band limit the activation grid is sized for; at least `band_limit`.
    pub grid_band: usize,
}

impl LayerSpec {
    pub fn validate(&self) -> Result<()> {
        if self.in_channels == 0 || self.out_channels == 0 {
            return Err(NnError::Config("layers need at least one channel".into()));
        }
        let l = self.band_limit;
        if self.p.unsigned_abs() as usize > l || self.q.unsigned_abs() as usize > l {
            return Err(NnError::Config(format!(
                "orders p={} q={} exceed band limit {l}",
                self.p, self.q
            )));
        }
        if self.grid_band < l {
            return Err(NnError::Config(format!(
                "activation grid band {} below layer band limit {l}",
                self.grid_band
            )));
        }
        if let Some(s) = self.activation.slope() {
            if !(s > 0.0 && s <= 1.0) {
                return Err(NnError::Config(format!("leaky slope {s} outside (0, 1]")));
            }
        }
        Ok(())
    }

    /// Weight count per channel pair.
    pub fn filter_len(&self) -> usize {
        column_len(self.band_limit, self.p)
    }
}

/// `x ↦ S_q σ(𝓕⁻¹[(1/(2l+1)) x̂ˡₘ ψₙˡ])`, summed over input channels.
///
/// Weights are restricted filters `ψ[c][o]` indexed by `(l, n)` for `l ≥ |p|`.
/// Only `q = 0` layers carry a bias, a real offset on the `(0, 0)` coefficient.
#[derive(Debug, Clone)]
pub struct ConvLayer {
    spec: LayerSpec,
    weights: Vec<Vec<Complex64>>,
    bias: Option<Vec<f64>>,
    grid: Arc<LayerGrid>,
}

/// Pre-activation samples saved by the forward pass, one vector per output channel.
#[derive(Debug, Clone, Default)]
pub struct LayerCache {
    pre: Vec<Vec<Complex64>>,
}

/// Gradients of one layer's parameters, laid out like the layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad {
    pub weights: Vec<Vec<Complex64>>,
    pub bias: Option<Vec<f64>>,
    pub slope: f64,
}

impl LayerGrad {
    /// Appends the gradient in [`ConvLayer::params`] order.
    pub fn flatten_into(&self, out: &mut Vec<f64>, with_slope: bool) {
        for w in &self.weights {
            for c in w {
                out.push(c.re);
                out.push(c.im);
            }
        }
        if let Some(b) = &self.bias {
            out.extend_from_slice(b);
        }
        if with_slope {
            out.push(self.slope);
        }
    }
}

impl ConvLayer {
    /// All-zero weights and biases.
    pub fn zeros(spec: LayerSpec) -> Result<Self> {
        spec.validate()?;
        let grid = Arc::new(LayerGrid::new(spec.band_limit, EulerGrid::for_band_limit(spec.grid_band)));
        Ok(Self::with_grid(spec, grid))
    }

    /// Like [`ConvLayer::zeros`] but reusing precomputed grid tables.
    pub fn zeros_on(spec: LayerSpec, grid: Arc<LayerGrid>) -> Result<Self> {
        spec.validate()?;
        let g = grid.grid();
        if grid.band_limit() != spec.band_limit || g.validate(spec.band_limit).is_err() || g.n_beta < 2 * spec.band_limit + 3 {
            return Err(NnError::Shape("grid tables do not match the layer".into()));
        }
        Ok(Self::with_grid(spec, grid))
    }

    fn with_grid(spec: LayerSpec, grid: Arc<LayerGrid>) -> Self {
        ConvLayer {
            weights: vec![vec![ZERO; spec.filter_len()]; spec.in_channels * spec.out_channels],
            bias: (spec.q == 0).then(|| vec![0.0; spec.out_channels]),
            grid,
            spec,
        }
    }

    /// Complex Gaussian weights with per-degree variance `(2l+1)/C_in`, zero bias.
    ///
    /// With the `1/(2l+1)` in the forward map this keeps the expected Parseval norm
    /// of each degree block unchanged from input to pre-activation.
    pub fn init<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let p = self.spec.p;
        let cin = self.spec.in_channels as f64;
        for w in &mut self.weights {
            for l in p.unsigned_abs() as usize..=self.spec.band_limit {
                let sd = ((2 * l + 1) as f64 / cin / 2.0).sqrt();
                let li = l as i32;
                for n in -li..=li {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    w[column_index(p, l, n)] = Complex64::new(re, im) * sd;
                }
            }
        }
    }

    pub fn spec(&self) -> &LayerSpec {
        &self.spec
    }

    pub fn band_limit(&self) -> usize {
        self.spec.band_limit
    }

    pub fn p(&self) -> i32 {
        self.spec.p
    }

    pub fn q(&self) -> i32 {
        self.spec.q
    }

    pub fn activation(&self) -> &Activation {
        &self.spec.activation
    }

    pub fn grid(&self) -> &Arc<LayerGrid> {
        &self.grid
    }

    /// Filter for input channel `c` and output channel `o`.
    pub fn filter(&self, c: usize, o: usize) -> &[Complex64] {
        &self.weights[c * self.spec.out_channels + o]
    }

    pub fn filter_mut(&mut self, c: usize, o: usize) -> &mut [Complex64] {
        &mut self.weights[c * self.spec.out_channels + o]
    }

    pub fn bias(&self) -> Option<&[f64]> {
        self.bias.as_deref()
    }

    pub fn bias_mut(&mut self) -> Option<&mut [f64]> {
        self.bias.as_deref_mut()
    }

    pub fn set_slope(&mut self, slope: f64) {
        self.spec.activation.set_slope(slope);
    }

    /// Real scalars: weights (re, im interleaved), then biases, then the slope.
    pub fn n_params(&self) -> usize {
        2 * self.weights.len() * self.spec.filter_len()
            + self.bias.as_ref().map_or(0, Vec::len)
            + self.spec.activation.n_params()
    }

    pub fn params_into(&self, out: &mut Vec<f64>) {
        for w in &self.weights {
            for c in w {
                out.push(c.re);
                out.push(c.im);
            }
        }
        if let Some(b) = &self.bias {
            out.extend_from_slice(b);
        }
        if let (1, Some(s)) = (self.spec.activation.n_params(), self.spec.activation.slope()) {
            out.push(s);
        }
    }

    /// Reads parameters written by [`ConvLayer::params_into`]; returns the count used.
    pub fn set_params(&mut self, src: &[f64]) -> Result<usize> {
        let n = self.n_params();
        if src.len() < n {
            return Err(NnError::Shape(format!("layer needs {n} parameters, got {}", src.len())));
        }
        let mut it = src.iter().copied();
        for w in &mut self.weights {
            for c in w.iter_mut() {
                *c = Complex64::new(it.next().unwrap(), it.next().unwrap());
            }
        }
        if let Some(b) = &mut self.bias {
            for v in b.iter_mut() {
                *v = it.next().unwrap();
            }
        }
        if self.spec.activation.n_params() == 1 {
            let s = it.next().unwrap();
            self.spec.activation.set_slope(s);
        }
        Ok(n)
    }

    fn check_input(&self, x: &Features) -> Result<()> {
        if x.band_limit() != self.spec.band_limit || x.order() != self.spec.p {
            return Err(NnError::Shape(format!(
                "layer expects order {} at band limit {}, got order {} at {}",
                self.spec.p,
                self.spec.band_limit,
                x.order(),
                x.band_limit()
            )));
        }
        if x.n_channels() != self.spec.in_channels {
            return Err(NnError::Shape(format!(
                "layer expects {} channels, got {}",
                self.spec.in_channels,
                x.n_channels()
            )));
        }
        Ok(())
    }

    /// Full pre-activation spectrum of output channel `o`.
    fn convolve(&self, x: &Features, o: usize) -> Vec<Complex64> {
        let l_max = self.spec.band_limit;
        let p = self.spec.p;
        let mut y = vec![ZERO; spectrum_offset(l_max + 1)];
        for c in 0..self.spec.in_channels {
            let xc = x.channel(c);
            let psi = self.filter(c, o);
            for l in p.unsigned_abs() as usize..=l_max {
                let li = l as i32;
                let dim = 2 * l + 1;
                let w = 1.0 / dim as f64;
                let f = &psi[column_index(p, l, -li)..][..dim];
                let block = &mut y[spectrum_offset(l)..][..dim * dim];
                for (mi, m) in (-li..=li).enumerate() {
                    let xv = xc[column_index(p, l, m)] * w;
                    for (yv, fv) in block[mi * dim..][..dim].iter_mut().zip(f) {
                        *yv += xv * fv;
                    }
                }
            }
        }
        y
    }

    /// Column `−q` of the convolution, skipping the grid entirely.
    fn convolve_column(&self, x: &Features, o: usize) -> Vec<Complex64> {
        let (p, q) = (self.spec.p, self.spec.q);
        let mut out = vec![ZERO; column_len(self.spec.band_limit, q)];
        let lo = p.unsigned_abs().max(q.unsigned_abs()) as usize;
        for c in 0..self.spec.in_channels {
            let xc = x.channel(c);
            let psi = self.filter(c, o);
            for l in lo..=self.spec.band_limit {
                let li = l as i32;
                let f = psi[column_index(p, l, -q)] / (2 * l + 1) as f64;
                for m in -li..=li {
                    out[column_index(q, l, m)] += xc[column_index(p, l, m)] * f;
                }
            }
        }
        out
    }

    pub fn forward(&self, x: &Features) -> Result<Features> {
        self.run(x, false).map(|(y, _)| y)
    }

    /// Forward pass that also returns what [`ConvLayer::backward`] needs.
    pub fn forward_cached(&self, x: &Features) -> Result<(Features, LayerCache)> {
        self.run(x, true)
    }

    fn run(&self, x: &Features, keep: bool) -> Result<(Features, LayerCache)> {
        self.check_input(x)?;
        let act = self.spec.activation;
        let mut cache = LayerCache::default();
        let mut channels = Vec::with_capacity(self.spec.out_channels);
        let mut scratch = Scratch::default();
        let mut z = Vec::new();
        let mut a = Vec::new();
        for o in 0..self.spec.out_channels {
            let mut col = if act.is_identity() {
                self.convolve_column(x, o)
            } else {
                let y = self.convolve(x, o);
                if keep {
                    self.grid.synthesize_into(&y, &mut z, &mut scratch);
                    a.clear();
                    a.extend(z.iter().map(|v| act.apply(*v)));
                    cache.pre.push(std::mem::take(&mut z));
                    self.grid.analyze_column(&a, self.spec.q)
                } else {
                    self.grid.synthesize_activate_column(&y, |v| act.apply(v), self.spec.q, &mut scratch)
                }
            };
            if let Some(b) = &self.bias {
                col[0] += b[o];
            }
            channels.push(col);
        }
        Ok((Features::new(self.spec.band_limit, self.spec.q, channels)?, cache))
    }

    /// Input gradient and parameter gradients for output gradient `g`.
    pub fn backward(&self, x: &Features, cache: &LayerCache, g: &Features) -> Result<(Features, LayerGrad)> {
        self.check_input(x)?;
        let spec = &self.spec;
        if g.order() != spec.q || g.band_limit() != spec.band_limit || g.n_channels() != spec.out_channels {
            return Err(NnError::Shape("gradient does not match layer output".into()));
        }
        let act = spec.activation;
        if !act.is_identity() && cache.pre.len() != spec.out_channels {
            return Err(NnError::Shape("layer cache missing pre-activations".into()));
        }
        let l_max = spec.band_limit;
        let (p, q) = (spec.p, spec.q);
        let mut grad = LayerGrad {
            weights: vec![vec![ZERO; spec.filter_len()]; self.weights.len()],
            bias: self.bias.as_ref().map(|_| (0..spec.out_channels).map(|o| g.channel(o)[0].re).collect()),
            slope: 0.0,
        };
        let mut gx = Features::zeros(l_max, p, spec.in_channels);
        let mut scratch = Scratch::default();
        for o in 0..spec.out_channels {
            let go = g.channel(o);
            // gradient of the full pre-activation spectrum
            let gy = if act.is_identity() {
                let mut gy = vec![ZERO; spectrum_offset(l_max + 1)];
                for l in p.unsigned_abs().max(q.unsigned_abs()) as usize..=l_max {
                    let li = l as i32;
                    let dim = 2 * l + 1;
                    for m in -li..=li {
                        gy[spectrum_offset(l) + (m + li) as usize * dim + (li - q) as usize] =
                            go[column_index(q, l, m)];
                    }
                }
                gy
            } else {
                let mut gz = self.grid.analyze_column_adjoint(go, q);
                for (z, gv) in cache.pre[o].iter().zip(gz.iter_mut()) {
                    let (v, s) = act.backward(*z, *gv);
                    *gv = v;
                    grad.slope += s;
                }
                self.grid.synthesize_adjoint_with(gz, &mut scratch)
            };
            for c in 0..spec.in_channels {
                let xc = x.channel(c);
                let psi = self.filter(c, o);
                let gpsi = &mut grad.weights[c * spec.out_channels + o];
                let gxc = gx.channel_mut(c);
                for l in p.unsigned_abs() as usize..=l_max {
                    let li = l as i32;
                    let dim = 2 * l + 1;
                    let w = 1.0 / dim as f64;
                    let base = column_index(p, l, -li);
                    let block = &gy[spectrum_offset(l)..][..dim * dim];
                    for (mi, m) in (-li..=li).enumerate() {
                        let row = &block[mi * dim..][..dim];
                        let xi = column_index(p, l, m);
                        let xv = xc[xi].conj() * w;
                        let mut acc = ZERO;
                        for ni in 0..dim {
                            acc += row[ni] * psi[base + ni].conj();
                            gpsi[base + ni] += xv * row[ni];
                        }
                        gxc[xi] += acc * w;
                    }
                }
            }
        }
        if act.n_params() == 0 {
            grad.slope = 0.0;
        }
        Ok((gx, grad))
    }
}
