use super::sphere::SphereField;
use crate::error::{Error, Result};

fn paired<'a>(
    x: &'a SphereField,
    y: &'a SphereField,
) -> Result<((&'a [f64], &'a [f64]), (&'a [f64], &'a [f64]))> {
    if !x.same_grid(y) {
        return Err(Error::GridMismatch(format!(
            "{}x{} vs {}x{}",
            x.n_lat(),
            x.n_lon(),
            y.n_lat(),
            y.n_lon()
        )));
    }
    Ok((x.components()?, y.components()?))
}

/// Mean vector deviation `𝒟 = (1/(AB)) Σ sin β |x − y|` over the lat/lon nodes.
pub fn distance(x: &SphereField, y: &SphereField) -> Result<f64> {
    let ((xu, xv), (yu, yv)) = paired(x, y)?;
    let mut acc = 0.0;
    for k in 0..x.n_lat() {
        let w = x.colatitude(k).sin();
        for j in 0..x.n_lon() {
            let i = x.index(k, j);
            acc += w * (xu[i] - yu[i]).hypot(xv[i] - yv[i]);
        }
    }
    Ok(acc / (x.n_lat() * x.n_lon()) as f64)
}

/// Training loss `Σ sin²β [(x₁ − y₁)² + (x₂ − y₂)²]`.
pub fn loss_weighted_mse(x: &SphereField, y: &SphereField) -> Result<f64> {
    let ((xu, xv), (yu, yv)) = paired(x, y)?;
    let mut acc = 0.0;
    for k in 0..x.n_lat() {
        let w = x.colatitude(k).sin().powi(2);
        for j in 0..x.n_lon() {
            let i = x.index(k, j);
            acc += w * ((xu[i] - yu[i]).powi(2) + (xv[i] - yv[i]).powi(2));
        }
    }
    Ok(acc)
}
