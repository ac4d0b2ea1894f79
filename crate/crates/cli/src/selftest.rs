//! Numerical self-checks run by `so3eq selftest`.
//!
//! Each check reports the largest error it saw against a fixed tolerance. The
//! quadrature oracles are deliberately independent of the fast transform.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use so3eq_core::signals::{EulerGrid, RotationMatrix, SpectralSignal};
use so3eq_core::so3fft::{dst_weights, evaluate, ft_direct, ft_fast, ift_fast, FftPlan};
use so3eq_core::spectral_ops::{conv_left, rotate_spectral, smooth, Filter};
use so3eq_core::wigner::{orthogonality_defect, wigner_D, wigner_d_with, wigner_deltas, WignerDelta};

use crate::error::{CliError, CliResult};

/// Largest band limit the self-test accepts.
pub const MAX_BAND_LIMIT: usize = 32;
/// Above this the direct transform is too slow to use as a reference.
pub const DIRECT_MAX_BAND_LIMIT: usize = 12;
/// The spatial convolution oracle runs at `min(L, CONV_MAX_BAND_LIMIT)`.
pub const CONV_MAX_BAND_LIMIT: usize = 4;

pub const TOL_ORTHOGONALITY: f64 = 1e-11;
pub const TOL_REPRESENTATION: f64 = 1e-10;
pub const TOL_ROUNDTRIP: f64 = 1e-9;
pub const TOL_DIRECT: f64 = 1e-9;
pub const TOL_CONVOLUTION: f64 = 1e-4;
pub const TOL_SMOOTHING: f64 = 1e-10;
pub const TOL_EQUIVARIANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<22} max_error={:.3e} tol={:.0e} {}",
            self.name,
            self.max_error,
            self.tolerance,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect()
    }

    fn push(&mut self, name: &'static str, max_error: f64, tolerance: f64) {
        // NaN must fail, not slip past `<=`
        let max_error = if max_error.is_nan() { f64::INFINITY } else { max_error };
        self.checks.push(Check { name, max_error, tolerance });
    }
}

pub struct Options {
    pub band_limit: usize,
    pub seed: u64,
    /// Perturbs the highest-degree `Δ` before the transform checks run.
    pub corrupt_delta: bool,
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn random_spectrum(rng: &mut ChaCha8Rng, band_limit: usize) -> SpectralSignal {
    let mut x = SpectralSignal::zeros(band_limit);
    for c in x.coeffs_mut() {
        *c = gaussian(rng);
    }
    x
}

fn random_rotation(rng: &mut ChaCha8Rng) -> RotationMatrix {
    let a = rng.random::<f64>() * 2.0 * PI;
    let b = (1.0 - 2.0 * rng.random::<f64>()).acos();
    let g = rng.random::<f64>() * 2.0 * PI;
    RotationMatrix::from_euler(a, b, g)
}

/// `∫ f dμ` over SO(3), exact for band-limited `f` of degree at most `degree`.
pub fn haar_integral(degree: usize, f: impl Fn(f64, f64, f64) -> Complex64) -> Complex64 {
    let n = 2 * degree + 1;
    let g = EulerGrid::new(n, n + 2, n).expect("quadrature grid is valid");
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

fn corrupt(deltas: &mut [Arc<WignerDelta>]) {
    let last = deltas.len() - 1;
    let mut e = deltas[last].entries().clone();
    e[(0, 0)] += 0.25;
    deltas[last] = Arc::new(WignerDelta::from_entries(last, e));
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1e-300)
}

pub fn run(opts: &Options) -> CliResult<Report> {
    let l = opts.band_limit;
    if l > MAX_BAND_LIMIT {
        return Err(CliError::Config(format!("band limit {l} exceeds {MAX_BAND_LIMIT}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = Report::default();

    let mut deltas = wigner_deltas(l);
    if opts.corrupt_delta {
        corrupt(&mut deltas);
    }

    // Δ and d(β) built from it must be orthogonal
    let betas: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * PI).collect();
    let mut worst = 0.0f64;
    for delta in &deltas {
        worst = worst.max(delta.orthogonality_defect());
        for &b in &betas {
            worst = worst.max(orthogonality_defect(&wigner_d_with(delta, b)));
        }
    }
    report.push("orthogonality", worst, TOL_ORTHOGONALITY);

    let a = random_rotation(&mut rng);
    let b = random_rotation(&mut rng);
    let (ea, eb, eab) = (a.to_euler(), b.to_euler(), (&a * &b).to_euler());
    let mut worst = 0.0f64;
    for deg in 0..=l {
        let da = wigner_D(deg, ea.0, ea.1, ea.2);
        let db = wigner_D(deg, eb.0, eb.1, eb.2);
        let dab = wigner_D(deg, eab.0, eab.1, eab.2);
        worst = worst.max((da * db - dab).iter().map(|c| c.norm()).fold(0.0, f64::max));
    }
    report.push("representation", worst, TOL_REPRESENTATION);

    let plan = FftPlan::with_deltas(l, EulerGrid::for_band_limit(l), deltas)?;
    let mut round = 0.0f64;
    let mut direct = 0.0f64;
    for _ in 0..3 {
        let x = random_spectrum(&mut rng, l);
        let s = ift_fast(&x, &plan)?;
        round = round.max(ft_fast(&s, &plan)?.relative_error(&x));
        if l <= DIRECT_MAX_BAND_LIMIT {
            direct = direct.max(ft_direct(&s, l)?.relative_error(&ft_fast(&s, &plan)?));
        }
    }
    report.push("transform_roundtrip", round, TOL_ROUNDTRIP);
    if l <= DIRECT_MAX_BAND_LIMIT {
        report.push("transform_direct", direct, TOL_DIRECT);
    }

    let lc = l.min(CONV_MAX_BAND_LIMIT);
    let x = random_spectrum(&mut rng, lc);
    let psi = random_spectrum(&mut rng, lc);
    let y = conv_left(&x, &Filter::full(psi.clone()))?;
    let mut worst = 0.0f64;
    for _ in 0..2 {
        let a = random_rotation(&mut rng);
        let ainv = a.inverse();
        let oracle = haar_integral(2 * lc, |al, be, ga| {
            let (p, q, s) = (&ainv * &RotationMatrix::from_euler(al, be, ga)).to_euler();
            evaluate(&x, al, be, ga) * evaluate(&psi, p, q, s).conj()
        });
        let (al, be, ga) = a.to_euler();
        worst = worst.max(rel((evaluate(&y, al, be, ga) - oracle).norm(), oracle.norm().max(1.0)));
    }
    report.push("convolution_oracle", worst, TOL_CONVOLUTION);

    let x = random_spectrum(&mut rng, l);
    let orders: Vec<i32> = [0i32, 1, -1].into_iter().filter(|q: &i32| q.unsigned_abs() as usize <= l).collect();
    let mut worst = 0.0f64;
    for &q in &orders {
        let s = smooth(&x, q)?;
        for _ in 0..2 {
            let (al, be, ga) = random_rotation(&mut rng).to_euler();
            let n = 256;
            let oracle = (0..n)
                .map(|t| {
                    let th = 2.0 * PI * t as f64 / n as f64;
                    Complex64::from_polar(1.0, q as f64 * th) * evaluate(&x, al, be, ga + th)
                })
                .sum::<Complex64>()
                / n as f64;
            worst = worst.max((evaluate(&s, al, be, ga) - oracle).norm());
        }
    }
    report.push("smoothing_oracle", worst, TOL_SMOOTHING);

    // rotation by B is (B·x)(A) = x(B⁻¹A); convolution and smoothing commute with it
    let x = random_spectrum(&mut rng, l);
    let psi = Filter::full(random_spectrum(&mut rng, l));
    let b = random_rotation(&mut rng);
    let bx = rotate_spectral(&x, &b);
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let a = random_rotation(&mut rng);
        let (al, be, ga) = a.to_euler();
        let (p, q, s) = (&b.inverse() * &a).to_euler();
        worst = worst.max(rel((evaluate(&bx, al, be, ga) - evaluate(&x, p, q, s)).norm(), x.norm()));
    }
    let lhs = conv_left(&bx, &psi)?;
    let rhs = rotate_spectral(&conv_left(&x, &psi)?, &b);
    worst = worst.max(lhs.relative_error(&rhs));
    for &q in &orders {
        let lhs = smooth(&bx, q)?;
        let rhs = rotate_spectral(&smooth(&x, q)?, &b);
        worst = worst.max(rel(lhs.max_abs_diff(&rhs), x.norm()));
    }
    report.push("equivariance", worst, TOL_EQUIVARIANCE);

    Ok(report)
}
