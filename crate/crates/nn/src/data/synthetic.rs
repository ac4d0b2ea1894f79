use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use so3eq_core::signals::SpectralSignal;

use crate::activation::Activation;
use crate::error::{NnError, Result};
use crate::features::Features;
use crate::layer::{ConvLayer, LayerSpec};
use crate::train::{random_rotation, Sample};

/// Activation grid of the teacher's first layer, in multiples of the band limit.
pub const TEACHER_OVERSAMPLE: usize = 4;

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Random signal in `X_p`: i.i.d. complex Gaussian coefficients on column `−p`
/// scaled by `(1+l)^(−decay)`.
///
/// With `real` (only for `p = 0`) the coefficients are symmetrized so that
/// `x̂ˡₘ,₀ = (−1)^m conj(x̂ˡ₋ₘ,₀)`, which makes the synthesized signal real.
pub fn random_bandlimited(seed: u64, band_limit: usize, order: i32, decay: f64, real: bool) -> Result<SpectralSignal> {
    if real && order != 0 {
        return Err(NnError::Config("only order-0 signals can be real".into()));
    }
    if order.unsigned_abs() as usize > band_limit || decay.is_nan() || decay < 0.0 {
        return Err(NnError::Config(format!(
            "cannot draw an order-{order} signal at band limit {band_limit} with decay {decay}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = SpectralSignal::from_column(band_limit, order, |l, _| gaussian(&mut rng) * (1.0 + l as f64).powf(-decay));
    if real {
        for l in 0..=band_limit {
            let li = l as i32;
            let c0 = x.get(l, 0, 0);
            x.set(l, 0, 0, Complex64::new(c0.re, 0.0));
            for m in 1..=li {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let v = x.get(l, m, 0);
                x.set(l, -m, 0, v.conj() * sign);
            }
        }
    }
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskKind {
    /// Vector field to vector field through a fixed teacher.
    Wind2Wind,
    /// Real scalar field to vector field through a fixed teacher.
    Temp2Wind,
    /// Vector field reproduced unchanged.
    Autoencode,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Wind2Wind => "wind2wind",
            TaskKind::Temp2Wind => "temp2wind",
            TaskKind::Autoencode => "autoencode",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "wind2wind" => Some(TaskKind::Wind2Wind),
            "temp2wind" => Some(TaskKind::Temp2Wind),
            "autoencode" => Some(TaskKind::Autoencode),
            _ => None,
        }
    }

    pub fn input_order(self) -> i32 {
        match self {
            TaskKind::Temp2Wind => 0,
            _ => 1,
        }
    }

    pub fn output_order(self) -> i32 {
        1
    }

    /// Order used by hidden layers of models trained on this task.
    pub fn hidden_order(self) -> i32 {
        match self {
            TaskKind::Temp2Wind => 0,
            _ => 1,
        }
    }
}

/// Frozen map generating targets: a linear layer from input to output order plus
/// a `ModTanh` layer into four hidden channels read out by a second linear layer.
///
/// The smooth activation on an oversampled grid keeps aliasing far below the leaky
/// ReLU's, so the teacher is equivariant to high accuracy.
#[derive(Debug, Clone)]
pub struct Teacher {
    layers: [ConvLayer; 3],
}

impl Teacher {
    pub const HIDDEN: usize = 4;

    pub fn new(kind: TaskKind, band_limit: usize, seed: u64, gain: f64) -> Result<Self> {
        let q_mid = kind.hidden_order();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7ea_c4e7);
        let mut a = ConvLayer::zeros(LayerSpec {
            in_channels: 1,
            out_channels: Self::HIDDEN,
            p: kind.input_order(),
            q: q_mid,
            band_limit,
            activation: Activation::ModTanh,
            grid_band: TEACHER_OVERSAMPLE * band_limit,
        })?;
        a.init(&mut rng);
        let mut params = Vec::new();
        a.params_into(&mut params);
        params.iter_mut().for_each(|v| *v *= gain);
        a.set_params(&params)?;
        let mut b = ConvLayer::zeros(LayerSpec {
            in_channels: Self::HIDDEN,
            out_channels: 1,
            p: q_mid,
            q: kind.output_order(),
            band_limit,
            activation: Activation::Identity,
            grid_band: band_limit,
        })?;
        b.init(&mut rng);
        let mut c = ConvLayer::zeros(LayerSpec {
            in_channels: 1,
            out_channels: 1,
            p: kind.input_order(),
            q: kind.output_order(),
            band_limit,
            activation: Activation::Identity,
            grid_band: band_limit,
        })?;
        c.init(&mut rng);
        Ok(Teacher { layers: [a, b, c] })
    }

    pub fn forward(&self, x: &Features) -> Result<Features> {
        let mut y = self.layers[1].forward(&self.layers[0].forward(x)?)?;
        y.add_assign(&self.layers[2].forward(x)?)?;
        Ok(y)
    }
}

/// Recipe for a synthetic dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTask {
    pub kind: TaskKind,
    pub seed: u64,
    pub n_samples: usize,
    pub band_limit: usize,
    /// Standard deviation of Gaussian noise added to target coefficients.
    pub noise: f64,
    /// Spectral decay exponent of the inputs.
    pub decay: f64,
    /// Scale of the teacher's first-layer weights.
    pub gain: f64,
}

impl SyntheticTask {
    pub fn new(kind: TaskKind, band_limit: usize, n_samples: usize, seed: u64) -> Self {
        SyntheticTask {
            kind,
            seed,
            n_samples,
            band_limit,
            noise: 0.0,
            decay: 1.0,
            gain: 0.5,
        }
    }

    pub fn teacher(&self) -> Result<Option<Teacher>> {
        match self.kind {
            TaskKind::Autoencode => Ok(None),
            k => Teacher::new(k, self.band_limit, self.seed, self.gain).map(Some),
        }
    }
}

/// Inputs from [`random_bandlimited`], targets from the task's teacher plus noise.
pub fn make_dataset(task: &SyntheticTask) -> Result<Vec<Sample>> {
    let teacher = task.teacher()?;
    let p = task.kind.input_order();
    let mut seeds = ChaCha8Rng::seed_from_u64(task.seed);
    let mut out = Vec::with_capacity(task.n_samples);
    for _ in 0..task.n_samples {
        let s: u64 = seeds.random();
        let x = random_bandlimited(s, task.band_limit, p, task.decay, p == 0)?;
        let input = Features::from_spectrum(&x, p)?;
        let mut target = match &teacher {
            Some(t) => t.forward(&input)?,
            None => input.clone(),
        };
        if task.noise > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x5eed_0f_0015e);
            for c in 0..target.n_channels() {
                for v in target.channel_mut(c) {
                    *v += gaussian(&mut rng) * (task.noise / std::f64::consts::SQRT_2);
                }
            }
        }
        out.push(Sample { input, target });
    }
    Ok(out)
}

/// Rotates input and target by one Haar-random rotation drawn from `seed`.
pub fn augment_rotate(sample: &Sample, seed: u64) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample.rotated(&random_rotation(&mut rng))
}
