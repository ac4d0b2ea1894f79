use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use so3eq_core::signals::RotationMatrix;
use so3eq_core::spectral_ops::rotation_coefficients;

use crate::error::{NnError, Result};
use crate::features::Features;
use crate::loss::SphereLoss;
use crate::optim::Adam;
use crate::unet::UNet;

/// One input/target pair in physical units.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: Features,
    pub target: Features,
}

impl Sample {
    /// Applies the same left translation to input and target.
    pub fn rotated(&self, b: &RotationMatrix) -> Sample {
        let li = self.input.band_limit();
        let lt = self.target.band_limit();
        let coeffs = rotation_coefficients(b, li.max(lt));
        Sample {
            input: self.input.rotate_with(&coeffs),
            target: self.target.rotate_with(&coeffs),
        }
    }
}

/// Haar-uniform rotation: `α, γ` uniform, `cos β` uniform.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> RotationMatrix {
    let a = rng.random::<f64>() * std::f64::consts::TAU;
    let b = (1.0 - 2.0 * rng.random::<f64>()).clamp(-1.0, 1.0).acos();
    let g = rng.random::<f64>() * std::f64::consts::TAU;
    RotationMatrix::from_euler(a, b, g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub seed: u64,
    /// Rotate every training pair by a fresh random rotation each epoch.
    pub augment: bool,
    /// Fit `in_scale`/`out_scale` to the training set before the first epoch.
    pub normalize: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 30,
            lr: 1e-3,
            batch_size: 8,
            seed: 0,
            augment: false,
            normalize: true,
        }
    }
}

/// One line of the metrics log. Epoch 0 is the untrained model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_distance: f64,
    pub val_distance_rotated: f64,
}

pub const METRICS_HEADER: &str = "epoch,train_loss,val_distance,val_distance_rotated";

impl MetricsRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{:.9e},{:.9e},{:.9e}",
            self.epoch, self.train_loss, self.val_distance, self.val_distance_rotated
        )
    }
}

fn rms(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut n) = (0.0, 0usize);
    for v in xs {
        s += v;
        n += 1;
    }
    if n == 0 || s == 0.0 {
        1.0
    } else {
        (s / n as f64).sqrt()
    }
}

/// Sets `in_scale` and `out_scale` so that normalized coefficient columns have
/// unit mean square norm per channel.
pub fn fit_scales(model: &mut UNet, data: &[Sample]) {
    let per_channel = |f: &Features| f.norm_sq() / f.n_channels() as f64;
    model.in_scale = 1.0 / rms(data.iter().map(|s| per_channel(&s.input)));
    model.out_scale = rms(data.iter().map(|s| per_channel(&s.target)));
}

fn normalized(model: &UNet, s: &Sample) -> (Features, Features) {
    let mut x = s.input.clone();
    x.scale(model.in_scale);
    let mut t = s.target.clone();
    t.scale(1.0 / model.out_scale);
    (x, t)
}

/// Mean loss over `data` in normalized units.
pub fn mean_loss(model: &UNet, loss: &SphereLoss, data: &[Sample]) -> Result<f64> {
    let mut acc = 0.0;
    for s in data {
        let (x, t) = normalized(model, s);
        acc += loss.loss(&model.forward(&x)?, &t)?;
    }
    Ok(acc / data.len().max(1) as f64)
}

/// Mean distance between predictions and targets in physical units.
pub fn mean_distance(model: &UNet, loss: &SphereLoss, data: &[Sample]) -> Result<f64> {
    let mut acc = 0.0;
    for s in data {
        acc += loss.distance(&model.predict(&s.input)?, &s.target)?;
    }
    Ok(acc / data.len().max(1) as f64)
}

/// Loss and flattened gradient of one normalized pair.
pub fn sample_gradient(model: &UNet, loss: &SphereLoss, x: &Features, t: &Features) -> Result<(f64, Vec<f64>)> {
    let (y, mut tape) = model.forward_taped(x)?;
    let (value, g) = loss.loss_and_grad(&y, t)?;
    let grads = tape.backward(model.layers(), &g)?;
    Ok((value, model.flatten_grads(&grads)))
}

/// Minibatch Adam on the sphere loss.
///
/// The validation set is scored as given and after one fixed random rotation per
/// sample. `on_epoch` sees each metrics row as soon as it is computed.
pub fn train(
    model: &mut UNet,
    train_set: &[Sample],
    val_set: &[Sample],
    config: &TrainConfig,
    mut on_epoch: impl FnMut(&MetricsRow),
) -> Result<Vec<MetricsRow>> {
    if train_set.is_empty() {
        return Err(NnError::Config("empty training set".into()));
    }
    if config.batch_size == 0 {
        return Err(NnError::Config("batch size must be positive".into()));
    }
    if !(config.lr >= 0.0 && config.lr.is_finite()) {
        return Err(NnError::Config(format!("learning rate {} is invalid", config.lr)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    if config.normalize {
        fit_scales(model, train_set);
    }
    let loss = SphereLoss::new(model.band_limit(), model.config().q_out);
    let val_rot: Vec<Sample> = val_set.iter().map(|s| s.rotated(&random_rotation(&mut rng))).collect();

    let evaluate = |model: &UNet, epoch: usize, train_loss: f64| -> Result<MetricsRow> {
        Ok(MetricsRow {
            epoch,
            train_loss,
            val_distance: mean_distance(model, &loss, val_set)?,
            val_distance_rotated: mean_distance(model, &loss, &val_rot)?,
        })
    };

    let initial = mean_loss(model, &loss, train_set)?;
    if !initial.is_finite() {
        return Err(NnError::NonFinite { epoch: 0, step: 0, value: initial });
    }
    let mut rows = vec![evaluate(model, 0, initial)?];
    on_epoch(&rows[0]);

    let mut params = model.params();
    let mut opt = Adam::new(params.len(), config.lr);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut step = 0;
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let mut grad = vec![0.0; params.len()];
            let mut batch_loss = 0.0;
            for &i in batch {
                let sample = if config.augment {
                    train_set[i].rotated(&random_rotation(&mut rng))
                } else {
                    train_set[i].clone()
                };
                let (x, t) = normalized(model, &sample);
                let (value, g) = sample_gradient(model, &loss, &x, &t)?;
                batch_loss += value;
                for (a, b) in grad.iter_mut().zip(&g) {
                    *a += b;
                }
            }
            step += 1;
            if !batch_loss.is_finite() {
                return Err(NnError::NonFinite { epoch, step, value: batch_loss });
            }
            epoch_loss += batch_loss;
            let inv = 1.0 / batch.len() as f64;
            grad.iter_mut().for_each(|g| *g *= inv);
            opt.step(&mut params, &grad);
            model.set_params(&params)?;
            // clamping may have moved slopes
            params = model.params();
        }
        let row = evaluate(model, epoch, epoch_loss / train_set.len() as f64)?;
        on_epoch(&row);
        rows.push(row);
    }
    Ok(rows)
}
