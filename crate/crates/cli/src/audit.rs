//! Model-equivariance audit: `f(B·x)` against `B·f(x)` over random rotations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use so3eq_core::signals::{EulerGrid, SpectralSignal};
use so3eq_core::so3fft::{ft_fast, ift_fast, FftPlan};
use so3eq_core::spectral_ops::rotation_coefficients;
use so3eq_nn::data::random_bandlimited;
use so3eq_nn::train::random_rotation;
use so3eq_nn::{Features, UNet};

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditReport {
    pub trials: usize,
    pub mean: f64,
    pub max: f64,
    /// Largest off-column coefficient of any output after a round trip through
    /// the spatial grid, relative to the largest coefficient.
    pub residue: f64,
}

fn relative_gap(a: &Features, b: &Features) -> f64 {
    let mut d = a.clone();
    let mut nb = b.clone();
    nb.scale(-1.0);
    d.add_assign(&nb).expect("same shape");
    (d.norm_sq() / b.norm_sq().max(1e-300)).sqrt()
}

fn off_column(y: &Features, plan: &FftPlan) -> CliResult<f64> {
    let mut worst = 0.0f64;
    for c in 0..y.n_channels() {
        let s: SpectralSignal = y.to_spectrum(c);
        let back = ft_fast(&ift_fast(&s, plan)?, plan)?;
        let scale = back.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        worst = worst.max(back.off_column_residue(y.order()) / scale);
    }
    Ok(worst)
}

/// One seeded input per model input channel, `trials` seeded rotations.
pub fn audit(model: &UNet, trials: usize, seed: u64) -> CliResult<AuditReport> {
    let cfg = model.config();
    let l = model.band_limit();
    let inputs = (0..cfg.in_channels)
        .map(|c| random_bandlimited(seed.wrapping_add(c as u64), l, cfg.p_in, 1.0, cfg.p_in == 0))
        .collect::<Result<Vec<_>, _>>()?;
    let x = Features::from_spectra(&inputs, cfg.p_in)?;
    let y = model.predict(&x)?;
    let plan = FftPlan::new(l, EulerGrid::for_band_limit(l))?;
    let mut residue = off_column(&y, &plan)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut max) = (0.0, 0.0f64);
    for _ in 0..trials {
        let coeffs = rotation_coefficients(&random_rotation(&mut rng), l);
        let y_rot = model.predict(&x.rotate_with(&coeffs))?;
        let e = relative_gap(&y_rot, &y.rotate_with(&coeffs));
        sum += e;
        max = max.max(e);
        residue = residue.max(off_column(&y_rot, &plan)?);
    }
    Ok(AuditReport {
        trials,
        mean: if trials > 0 { sum / trials as f64 } else { 0.0 },
        max,
        residue,
    })
}
