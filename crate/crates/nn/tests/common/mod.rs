#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use so3eq_core::signals::RotationMatrix;
use so3eq_core::spectral_ops::rotation_coefficients;
use so3eq_nn::features::column_len;
use so3eq_nn::Features;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_features(rng: &mut ChaCha8Rng, band_limit: usize, order: i32, channels: usize) -> Features {
    let len = column_len(band_limit, order);
    let chans = (0..channels)
        .map(|_| {
            let mut v = Vec::with_capacity(len);
            let p = order.unsigned_abs() as usize;
            for l in p..=band_limit {
                let s = 1.0 / (1.0 + l as f64);
                for _ in 0..2 * l + 1 {
                    v.push(Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * s);
                }
            }
            v
        })
        .collect();
    Features::new(band_limit, order, chans).unwrap()
}

pub fn random_rotation(rng: &mut ChaCha8Rng) -> RotationMatrix {
    let a = rng.random::<f64>() * std::f64::consts::TAU;
    let b = (1.0 - 2.0 * rng.random::<f64>()).acos();
    let g = rng.random::<f64>() * std::f64::consts::TAU;
    RotationMatrix::from_euler(a, b, g)
}

/// Left translation of each channel column.
pub fn rotate(x: &Features, b: &RotationMatrix) -> Features {
    let coeffs = rotation_coefficients(b, x.band_limit());
    x.rotate_with(&coeffs)
}

pub fn rel_err(a: &Features, b: &Features) -> f64 {
    let mut d = a.clone();
    d.scale(-1.0);
    d.add_assign(b).unwrap();
    (d.norm_sq() / b.norm_sq()).sqrt()
}
