use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::activation::Activation;
use crate::error::{NnError, Result};
use crate::features::Features;
use crate::layer::{ConvLayer, LayerGrad, LayerSpec};
use crate::tape::{Op, Tape};

/// Topology and hyperparameters of a [`UNet`].
#[derive(Debug, Clone, PartialEq)]
pub struct UNetConfig {
    /// Band limit per stage, strictly decreasing; `bands.len() = depth + 1`.
    pub bands: Vec<usize>,
    /// Feature channels per stage.
    pub channels: Vec<usize>,
    pub in_channels: usize,
    pub out_channels: usize,
    /// Order of the input signals.
    pub p_in: i32,
    /// Order of every hidden layer output.
    pub q_hidden: i32,
    /// Order of the model output.
    pub q_out: i32,
    pub slope: f64,
    pub learnable_slope: bool,
    /// Activation grids are sized for `ceil(oversample · L)`.
    pub oversample: f64,
}

impl UNetConfig {
    /// Depth `d` with bands `L(d+1−s)/(d+1)` and channels doubling from 8.
    pub fn with_depth(band_limit: usize, depth: usize, p_in: i32, q_hidden: i32, q_out: i32) -> Self {
        let bands = (0..=depth).map(|s| band_limit * (depth + 1 - s) / (depth + 1)).collect();
        let channels = (0..=depth).map(|s| 8 << s).collect();
        UNetConfig {
            bands,
            channels,
            in_channels: 1,
            out_channels: 1,
            p_in,
            q_hidden,
            q_out,
            slope: 0.01,
            learnable_slope: true,
            oversample: 1.0,
        }
    }

    /// Depth 3, bands `16 → 12 → 8 → 4`, channels `8 → 16 → 32 → 64`, vector in and out.
    pub fn default_vector() -> Self {
        Self::with_depth(16, 3, 1, 1, 1)
    }

    pub fn depth(&self) -> usize {
        self.bands.len().saturating_sub(1)
    }

    pub fn band_limit(&self) -> usize {
        self.bands[0]
    }

    pub fn validate(&self) -> Result<()> {
        if self.bands.is_empty() || self.bands.len() != self.channels.len() {
            return Err(NnError::Config("band and channel schedules must be non-empty and equally long".into()));
        }
        if self.bands.windows(2).any(|w| w[1] >= w[0]) {
            return Err(NnError::Config(format!("band schedule {:?} is not strictly decreasing", self.bands)));
        }
        let lowest = *self.bands.last().unwrap();
        let need = [self.p_in, self.q_hidden, self.q_out].iter().map(|o| o.unsigned_abs() as usize).max().unwrap();
        if lowest < need.max(1) {
            return Err(NnError::Config(format!(
                "coarsest band {lowest} cannot hold order-{need} signals"
            )));
        }
        if self.channels.contains(&0) || self.in_channels == 0 || self.out_channels == 0 {
            return Err(NnError::Config("channel counts must be positive".into()));
        }
        if !(self.oversample >= 1.0 && self.oversample <= 8.0) {
            return Err(NnError::Config(format!("oversample {} outside [1, 8]", self.oversample)));
        }
        if !(self.slope > 0.0 && self.slope <= 1.0) {
            return Err(NnError::Config(format!("slope {} outside (0, 1]", self.slope)));
        }
        Ok(())
    }

    fn grid_band(&self, band_limit: usize) -> usize {
        ((band_limit as f64 * self.oversample).ceil() as usize).max(band_limit)
    }

    /// Layer shapes in model order: encoder stages, decoder stages (finest last), output.
    pub fn layer_specs(&self) -> Vec<LayerSpec> {
        let act = Activation::LeakyRelu {
            slope: self.slope,
            learnable: self.learnable_slope,
        };
        let d = self.depth();
        let mut specs = Vec::with_capacity(2 * d + 2);
        for s in 0..=d {
            let (cin, p) = if s == 0 { (self.in_channels, self.p_in) } else { (self.channels[s - 1], self.q_hidden) };
            specs.push(LayerSpec {
                in_channels: cin,
                out_channels: self.channels[s],
                p,
                q: self.q_hidden,
                band_limit: self.bands[s],
                activation: act,
                grid_band: self.grid_band(self.bands[s]),
            });
        }
        for s in (0..d).rev() {
            specs.push(LayerSpec {
                in_channels: self.channels[s] + self.channels[s + 1],
                out_channels: self.channels[s],
                p: self.q_hidden,
                q: self.q_hidden,
                band_limit: self.bands[s],
                activation: act,
                grid_band: self.grid_band(self.bands[s]),
            });
        }
        specs.push(LayerSpec {
            in_channels: self.channels[0],
            out_channels: self.out_channels,
            p: self.q_hidden,
            q: self.q_out,
            band_limit: self.bands[0],
            activation: Activation::Identity,
            grid_band: self.bands[0],
        });
        specs
    }
}

/// Residual UNet of equivariant convolutions with spectral pooling.
///
/// Encoder stage `s > 0` pools to `bands[s]` before its convolution; each decoder
/// stage zero-pads the coarser features, stacks them after the skip features of
/// equal band limit and convolves. A final identity-activation layer maps to the
/// output order, which also serves as the closing smoothing step.
#[derive(Debug, Clone)]
pub struct UNet {
    config: UNetConfig,
    layers: Vec<ConvLayer>,
    /// Multiplier applied to raw inputs before the first layer.
    pub in_scale: f64,
    /// Multiplier applied to the last layer's output.
    pub out_scale: f64,
}

impl UNet {
    /// Zero-initialized model.
    pub fn zeros(config: UNetConfig) -> Result<Self> {
        config.validate()?;
        let layers = config.layer_specs().into_iter().map(ConvLayer::zeros).collect::<Result<_>>()?;
        Ok(UNet {
            config,
            layers,
            in_scale: 1.0,
            out_scale: 1.0,
        })
    }

    /// Randomly initialized model; see [`ConvLayer::init`].
    pub fn new(config: UNetConfig, seed: u64) -> Result<Self> {
        let mut model = UNet::zeros(config)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in &mut model.layers {
            layer.init(&mut rng);
        }
        Ok(model)
    }

    pub fn config(&self) -> &UNetConfig {
        &self.config
    }

    pub fn layers(&self) -> &[ConvLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [ConvLayer] {
        &mut self.layers
    }

    pub fn band_limit(&self) -> usize {
        self.config.band_limit()
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(ConvLayer::n_params).sum()
    }

    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for layer in &self.layers {
            layer.params_into(&mut out);
        }
        out
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(NnError::Shape(format!(
                "model has {} parameters, got {}",
                self.n_params(),
                params.len()
            )));
        }
        let mut at = 0;
        for layer in &mut self.layers {
            at += layer.set_params(&params[at..])?;
        }
        Ok(())
    }

    fn check_input(&self, x: &Features) -> Result<()> {
        let c = &self.config;
        if x.order() != c.p_in || x.band_limit() != c.band_limit() || x.n_channels() != c.in_channels {
            return Err(NnError::Shape(format!(
                "model expects {} channel(s) of order {} at band limit {}, got {} of order {} at {}",
                c.in_channels,
                c.p_in,
                c.band_limit(),
                x.n_channels(),
                x.order(),
                x.band_limit()
            )));
        }
        Ok(())
    }

    /// Output in model units; multiply by `out_scale` for physical units.
    pub fn forward(&self, x: &Features) -> Result<Features> {
        self.check_input(x)?;
        let d = self.config.depth();
        let mut skips = Vec::with_capacity(d + 1);
        let mut h = self.layers[0].forward(x)?;
        for s in 1..=d {
            let pooled = h.pool(self.config.bands[s]);
            skips.push(h);
            h = self.layers[s].forward(&pooled)?;
        }
        for (i, s) in (0..d).rev().enumerate() {
            let up = h.unpool(self.config.bands[s]);
            let cat = Features::concat(&[&skips[s], &up])?;
            h = self.layers[d + 1 + i].forward(&cat)?;
        }
        self.layers[2 * d + 1].forward(&h)
    }

    /// Forward pass recording everything [`Tape::backward`] needs.
    pub fn forward_taped(&self, x: &Features) -> Result<(Features, Tape)> {
        self.check_input(x)?;
        let d = self.config.depth();
        let mut tape = Tape::new(self.layers.len());
        let input = tape.push(x.clone());
        let mut h = tape.conv(&self.layers[0], 0, input)?;
        let mut skips = Vec::with_capacity(d + 1);
        for s in 1..=d {
            skips.push(h);
            let pooled = tape.record(Op::Pool { input: h }, tape.value(h).pool(self.config.bands[s]));
            h = tape.conv(&self.layers[s], s, pooled)?;
        }
        for (i, s) in (0..d).rev().enumerate() {
            let up = tape.record(Op::Unpool { input: h }, tape.value(h).unpool(self.config.bands[s]));
            let cat_val = Features::concat(&[tape.value(skips[s]), tape.value(up)])?;
            let cat = tape.record(Op::Concat { inputs: vec![skips[s], up] }, cat_val);
            h = tape.conv(&self.layers[d + 1 + i], d + 1 + i, cat)?;
        }
        let out = tape.conv(&self.layers[2 * d + 1], 2 * d + 1, h)?;
        Ok((tape.value(out).clone(), tape))
    }

    /// Physical-unit prediction: scales the input, runs the model, rescales the output.
    pub fn predict(&self, x: &Features) -> Result<Features> {
        let mut xs = x.clone();
        xs.scale(self.in_scale);
        let mut y = self.forward(&xs)?;
        y.scale(self.out_scale);
        Ok(y)
    }

    /// Same parameters evaluated on activation grids oversampled by `oversample`.
    pub fn regrid(&self, oversample: f64) -> Result<UNet> {
        let mut config = self.config.clone();
        config.oversample = oversample;
        let mut out = UNet::zeros(config)?;
        out.set_params(&self.params())?;
        out.in_scale = self.in_scale;
        out.out_scale = self.out_scale;
        Ok(out)
    }

    /// Flattens per-layer gradients in [`UNet::params`] order.
    pub fn flatten_grads(&self, grads: &[LayerGrad]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for (layer, g) in self.layers.iter().zip(grads) {
            g.flatten_into(&mut out, layer.activation().n_params() == 1);
        }
        out
    }
}
