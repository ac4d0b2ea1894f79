//! Sphere fields to spectra and back, on the field's own lat/lon grid.

use std::path::Path;

use so3eq_core::signals::{
    associate_scalar, associate_vector, extract_scalar, extract_vector, EulerGrid, FieldKind, RotationMatrix,
    SphereField, SpectralSignal,
};
use so3eq_core::so3fft::{ft_fast, ift_fast, FftPlan};
use so3eq_core::spectral_ops::rotate_spectral;
use so3eq_nn::data::{import_csv, load_field};

use crate::error::{CliError, CliResult};

/// Order of the associated signal: scalars live in `X_0`, tangent fields in `X_1`.
pub fn field_order(kind: FieldKind) -> i32 {
    match kind {
        FieldKind::Scalar => 0,
        FieldKind::Vector => 1,
    }
}

pub fn order_kind(order: i32) -> CliResult<FieldKind> {
    match order {
        0 => Ok(FieldKind::Scalar),
        1 => Ok(FieldKind::Vector),
        p => Err(CliError::Shape(format!("order {p} signals have no sphere-field form"))),
    }
}

/// Largest band limit whose default transform fits a field grid.
pub fn field_band_limit(n_lat: usize, n_lon: usize) -> CliResult<usize> {
    if n_lat < 3 || n_lon < 1 {
        return Err(CliError::Shape(format!("{n_lat}x{n_lon} grid is too small to transform")));
    }
    Ok(((n_lat - 3) / 2).min((n_lon - 1) / 2))
}

/// SO(3) grid whose `(α, β)` nodes are the field's longitudes and colatitudes.
pub fn field_plan(n_lat: usize, n_lon: usize, band_limit: usize) -> CliResult<FftPlan> {
    let grid = EulerGrid::new(n_lon, n_lat, 2 * band_limit + 2)?;
    Ok(FftPlan::new(band_limit, grid)?)
}

pub fn field_to_spectrum(f: &SphereField, plan: &FftPlan) -> CliResult<SpectralSignal> {
    let x = match f.kind() {
        FieldKind::Scalar => associate_scalar(f, plan.grid())?,
        FieldKind::Vector => associate_vector(f, plan.grid())?,
    };
    let mut xhat = ft_fast(&x, plan)?;
    xhat.verify_order(field_order(f.kind()), 1e-9)?;
    Ok(xhat)
}

pub fn spectrum_to_field(xhat: &SpectralSignal, kind: FieldKind, plan: &FftPlan) -> CliResult<SphereField> {
    let x = ift_fast(xhat, plan)?;
    Ok(match kind {
        FieldKind::Scalar => extract_scalar(&x)?,
        FieldKind::Vector => extract_vector(&x)?,
    })
}

/// Rotates a field by `Z(α)Y(β)Z(γ)` exactly in the spectral domain, at the
/// largest band limit its grid supports.
pub fn rotate_field(f: &SphereField, alpha: f64, beta: f64, gamma: f64) -> CliResult<SphereField> {
    let l = field_band_limit(f.n_lat(), f.n_lon())?;
    let plan = field_plan(f.n_lat(), f.n_lon(), l)?;
    let xhat = field_to_spectrum(f, &plan)?;
    let b = RotationMatrix::from_euler(alpha, beta, gamma);
    spectrum_to_field(&rotate_spectral(&xhat, &b), f.kind(), &plan)
}

/// Binary grid file, or CSV when the extension says so.
pub fn load_any(path: &Path) -> CliResult<SphereField> {
    let csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    Ok(if csv { import_csv(path)? } else { load_field(path)? })
}
