#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use so3eq_core::signals::{column_of_order, euler_to_matrix, EulerGrid, RotationMatrix, SpectralSignal};
use so3eq_core::so3fft::dst_weights;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_pair(rng: &mut ChaCha8Rng) -> Complex64 {
    // Box-Muller keeps the oracle free of the crate's own sampling code
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    Complex64::from_polar(r, 2.0 * PI * u2)
}

pub fn random_spectrum(band_limit: usize, seed: u64) -> SpectralSignal {
    let mut r = rng(seed);
    let mut x = SpectralSignal::zeros(band_limit);
    for c in x.coeffs_mut() {
        *c = gaussian_pair(&mut r);
    }
    x
}

pub fn random_column(band_limit: usize, order: i32, seed: u64) -> SpectralSignal {
    let mut r = rng(seed);
    SpectralSignal::from_column(band_limit, order, |_, _| gaussian_pair(&mut r))
}

pub fn random_rotation(rng: &mut ChaCha8Rng) -> RotationMatrix {
    let a = rng.random::<f64>() * 2.0 * PI;
    let b = (1.0 - 2.0 * rng.random::<f64>()).acos();
    let g = rng.random::<f64>() * 2.0 * PI;
    euler_to_matrix(a, b, g)
}

/// Haar integral `∫ f dμ` of a function of the Euler angles, exact when `f` is a
/// band-limited function of degree `≤ degree`.
pub fn haar_integral(degree: usize, f: impl Fn(f64, f64, f64) -> Complex64) -> Complex64 {
    let g = EulerGrid::new(2 * degree + 1, 2 * degree + 3, 2 * degree + 1).unwrap();
    let q = dst_weights(g.n_beta);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 1..g.n_beta - 1 {
        let b = g.beta(k);
        let w = q[k] * b.sin();
        for j in 0..g.n_alpha {
            for i in 0..g.n_gamma {
                acc += f(g.alpha(j), b, g.gamma(i)) * w;
            }
        }
    }
    acc / (2.0 * (g.n_alpha * g.n_gamma) as f64)
}

pub fn max_diff(a: &SpectralSignal, b: &SpectralSignal) -> f64 {
    a.max_abs_diff(b)
}

pub fn off_column(x: &SpectralSignal, order: i32) -> f64 {
    let col = column_of_order(order);
    let mut worst = 0.0f64;
    for l in 0..=x.band_limit() {
        let li = l as i32;
        for m in -li..=li {
            for n in -li..=li {
                if n != col {
                    worst = worst.max(x.get(l, m, n).norm());
                }
            }
        }
    }
    worst
}
