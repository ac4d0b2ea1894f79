use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::EulerGrid;
use super::rotation::{euler_to_matrix, RotationMatrix};
use super::spatial::SpatialSignal;
use super::sphere::{FieldKind, SphereField};
use crate::error::{Error, Result};

/// Relative tolerance for accepting a sampled signal as a member of `X_0` / `X_1`.
const SUBSPACE_TOLERANCE: f64 = 1e-8;

/// Field value at lat/lon node `(j, k)` of the Euler grid, exact when the sphere
/// grid coincides with the `(α, β)` nodes and bilinear otherwise.
fn sampler<'a>(f: &'a SphereField, grid: &EulerGrid) -> impl Fn(usize, usize) -> (f64, f64) + 'a {
    let aligned = f.n_lat() == grid.n_beta && f.n_lon() == grid.n_alpha;
    let g = *grid;
    move |j, k| {
        if aligned {
            let i = f.index(k, j);
            match f.kind() {
                FieldKind::Scalar => (f.values().unwrap()[i], 0.0),
                FieldKind::Vector => {
                    let (u, v) = f.components().unwrap();
                    (u[i], v[i])
                }
            }
        } else {
            f.interpolate(g.alpha(j), g.beta(k))
        }
    }
}

/// The γ-independent function `f ∘ π` on SO(3) associated with a scalar field.
pub fn associate_scalar(f: &SphereField, grid: &EulerGrid) -> Result<SpatialSignal> {
    if f.kind() != FieldKind::Scalar {
        return Err(Error::FieldKind { expected: "scalar" });
    }
    let at = sampler(f, grid);
    let mut out = SpatialSignal::zeros(*grid);
    for j in 0..grid.n_alpha {
        for k in 0..grid.n_beta {
            let t = Complex64::new(at(j, k).0, 0.0);
            for i in 0..grid.n_gamma {
                out.set(j, k, i, t);
            }
        }
    }
    Ok(out)
}

/// The function `i(U + iV)e^{−iγ}` associated with a tangent vector field.
pub fn associate_vector(f: &SphereField, grid: &EulerGrid) -> Result<SpatialSignal> {
    if f.kind() != FieldKind::Vector {
        return Err(Error::FieldKind { expected: "vector" });
    }
    let at = sampler(f, grid);
    let pole_rows = [0, grid.n_beta - 1];
    let mut out = SpatialSignal::zeros(*grid);
    for j in 0..grid.n_alpha {
        for k in 0..grid.n_beta {
            if pole_rows.contains(&k) {
                continue;
            }
            let (u, v) = at(j, k);
            let xi = Complex64::new(-v, u);
            for i in 0..grid.n_gamma {
                out.set(j, k, i, xi * Complex64::from_polar(1.0, -grid.gamma(i)));
            }
        }
    }
    Ok(out)
}

/// Projects the γ-dependence onto `e^{−ipγ}` and returns the node values at
/// `γ = 0` together with the worst residual relative to the signal scale.
fn gamma_mode(x: &SpatialSignal, p: i32) -> (Vec<Complex64>, f64) {
    let g = *x.grid();
    let phases: Vec<Complex64> = (0..g.n_gamma)
        .map(|i| Complex64::from_polar(1.0, -(p as f64) * g.gamma(i)))
        .collect();
    let mut base = vec![Complex64::new(0.0, 0.0); g.n_beta * g.n_alpha];
    let mut residue = 0.0f64;
    for k in 0..g.n_beta {
        for j in 0..g.n_alpha {
            let c: Complex64 = (0..g.n_gamma)
                .map(|i| x.get(j, k, i) * phases[i].conj())
                .sum::<Complex64>()
                / g.n_gamma as f64;
            for (i, ph) in phases.iter().enumerate() {
                residue = residue.max((x.get(j, k, i) - c * ph).norm());
            }
            base[k * g.n_alpha + j] = c;
        }
    }
    (base, residue / x.max_abs().max(1.0))
}

/// Reads a scalar field off a signal in `X_0`, on the `(α, β)` nodes of its grid.
pub fn extract_scalar(x: &SpatialSignal) -> Result<SphereField> {
    let g = *x.grid();
    let (base, residue) = gamma_mode(x, 0);
    if residue > SUBSPACE_TOLERANCE {
        return Err(Error::NotInSubspace { order: 0, residue });
    }
    SphereField::scalar(g.n_beta, g.n_alpha, base.iter().map(|c| c.re).collect())
}

/// Reads `(U, V) = (Im ξ, −Re ξ)` at `γ = 0` off a signal in `X_1`.
pub fn extract_vector(x: &SpatialSignal) -> Result<SphereField> {
    let g = *x.grid();
    let (base, residue) = gamma_mode(x, 1);
    if residue > SUBSPACE_TOLERANCE {
        return Err(Error::NotInSubspace { order: 1, residue });
    }
    let u = base.iter().map(|c| c.im).collect();
    let v = base.iter().map(|c| -c.re).collect();
    SphereField::vector(g.n_beta, g.n_alpha, u, v)
}

/// Linear interpolation weights on a periodic axis of `n` samples over `[0, 2π)`.
#[inline]
fn periodic(t: f64, n: usize) -> (usize, usize, f64) {
    let x = t.rem_euclid(2.0 * PI) * n as f64 / (2.0 * PI);
    let f = x.floor();
    let i0 = (f as usize) % n;
    (i0, (i0 + 1) % n, x - f)
}

/// Bilinear value in `(α, γ)` on β row `k` of the torus-extended grid, where rows
/// `k < 0` and `k > n_beta − 1` are read through `x(α, β, γ) = x(α+π, 2π−β, γ+π)`.
fn row_value(x: &SpatialSignal, k: isize, alpha: f64, gamma: f64) -> Complex64 {
    let g = x.grid();
    let last = (g.n_beta - 1) as isize;
    let (k, alpha, gamma) = if k < 0 {
        (-k, alpha + PI, gamma + PI)
    } else if k > last {
        (2 * last - k, alpha + PI, gamma + PI)
    } else {
        (k, alpha, gamma)
    };
    let k = k as usize;
    let (j0, j1, ta) = periodic(alpha, g.n_alpha);
    let (i0, i1, tg) = periodic(gamma, g.n_gamma);
    let lo = x.get(j0, k, i0) * (1.0 - tg) + x.get(j0, k, i1) * tg;
    let hi = x.get(j1, k, i0) * (1.0 - tg) + x.get(j1, k, i1) * tg;
    lo * (1.0 - ta) + hi * ta
}

/// Evaluates the sampled signal at arbitrary Euler angles by trilinear interpolation.
pub fn interpolate_spatial(x: &SpatialSignal, alpha: f64, beta: f64, gamma: f64) -> Complex64 {
    let g = x.grid();
    let y = beta * (g.n_beta - 1) as f64 / PI;
    let k0 = y.floor();
    let t = y - k0;
    let k0 = k0 as isize;
    let v0 = row_value(x, k0, alpha, gamma);
    if t == 0.0 {
        return v0;
    }
    v0 * (1.0 - t) + row_value(x, k0 + 1, alpha, gamma) * t
}

/// `(ℓ_B x)(A) = x(B⁻¹A)` resampled on the grid of `x` by trilinear interpolation.
///
/// Only an oracle: exact rotation of band-limited signals is done spectrally.
pub fn left_translate_spatial(x: &SpatialSignal, b: &RotationMatrix) -> SpatialSignal {
    let g = *x.grid();
    let binv = b.inverse();
    let mut out = SpatialSignal::zeros(g);
    for j in 0..g.n_alpha {
        for k in 0..g.n_beta {
            for i in 0..g.n_gamma {
                let a = euler_to_matrix(g.alpha(j), g.beta(k), g.gamma(i));
                let (al, be, ga) = (binv * a).to_euler();
                out.set(j, k, i, interpolate_spatial(x, al, be, ga));
            }
        }
    }
    out
}
