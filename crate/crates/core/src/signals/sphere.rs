use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Scalar,
    Vector,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Scalar => "scalar",
            FieldKind::Vector => "vector",
        }
    }

    /// Components stored per node.
    pub fn components(self) -> usize {
        match self {
            FieldKind::Scalar => 1,
            FieldKind::Vector => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum FieldData {
    Scalar(Vec<f64>),
    Vector { u: Vec<f64>, v: Vec<f64> },
}

/// A field on an equiangular lat/lon grid.
///
/// Node `(k, j)` sits at colatitude `β_k = πk/(n_lat − 1)` and longitude
/// `α_j = 2πj/n_lon`; storage is latitude-major (`k * n_lon + j`). Vector fields
/// carry eastward `U` and northward `V` components and vanish on both pole rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereField {
    n_lat: usize,
    n_lon: usize,
    data: FieldData,
}

fn check_shape(n_lat: usize, n_lon: usize, len: usize) -> Result<()> {
    if n_lat < 2 || n_lon == 0 {
        return Err(Error::InvalidArgument(format!(
            "sphere grid {n_lat}x{n_lon} needs n_lat >= 2 and n_lon >= 1"
        )));
    }
    if len != n_lat * n_lon {
        return Err(Error::GridMismatch(format!(
            "{len} values for a {n_lat}x{n_lon} grid"
        )));
    }
    Ok(())
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("field contains non-finite values".into()));
    }
    Ok(())
}

impl SphereField {
    pub fn scalar(n_lat: usize, n_lon: usize, values: Vec<f64>) -> Result<Self> {
        check_shape(n_lat, n_lon, values.len())?;
        check_finite(&values)?;
        Ok(SphereField {
            n_lat,
            n_lon,
            data: FieldData::Scalar(values),
        })
    }

    /// Builds a vector field; the pole rows are overwritten with zero.
    pub fn vector(n_lat: usize, n_lon: usize, mut u: Vec<f64>, mut v: Vec<f64>) -> Result<Self> {
        check_shape(n_lat, n_lon, u.len())?;
        check_shape(n_lat, n_lon, v.len())?;
        check_finite(&u)?;
        check_finite(&v)?;
        for k in [0, n_lat - 1] {
            u[k * n_lon..(k + 1) * n_lon].fill(0.0);
            v[k * n_lon..(k + 1) * n_lon].fill(0.0);
        }
        Ok(SphereField {
            n_lat,
            n_lon,
            data: FieldData::Vector { u, v },
        })
    }

    pub fn scalar_from_fn(n_lat: usize, n_lon: usize, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(n_lat * n_lon);
        for k in 0..n_lat {
            for j in 0..n_lon {
                values.push(f(lon(n_lon, j), colat(n_lat, k)));
            }
        }
        SphereField::scalar(n_lat, n_lon, values)
    }

    /// `f(longitude, colatitude) -> (U, V)`.
    pub fn vector_from_fn(
        n_lat: usize,
        n_lon: usize,
        mut f: impl FnMut(f64, f64) -> (f64, f64),
    ) -> Result<Self> {
        let mut u = Vec::with_capacity(n_lat * n_lon);
        let mut v = Vec::with_capacity(n_lat * n_lon);
        for k in 0..n_lat {
            for j in 0..n_lon {
                let (a, b) = f(lon(n_lon, j), colat(n_lat, k));
                u.push(a);
                v.push(b);
            }
        }
        SphereField::vector(n_lat, n_lon, u, v)
    }

    pub fn n_lat(&self) -> usize {
        self.n_lat
    }

    pub fn n_lon(&self) -> usize {
        self.n_lon
    }

    pub fn kind(&self) -> FieldKind {
        match self.data {
            FieldData::Scalar(_) => FieldKind::Scalar,
            FieldData::Vector { .. } => FieldKind::Vector,
        }
    }

    pub fn colatitude(&self, k: usize) -> f64 {
        colat(self.n_lat, k)
    }

    pub fn longitude(&self, j: usize) -> f64 {
        lon(self.n_lon, j)
    }

    #[inline]
    pub fn index(&self, k: usize, j: usize) -> usize {
        k * self.n_lon + j
    }

    pub fn values(&self) -> Result<&[f64]> {
        match &self.data {
            FieldData::Scalar(t) => Ok(t),
            FieldData::Vector { .. } => Err(Error::FieldKind { expected: "scalar" }),
        }
    }

    pub fn components(&self) -> Result<(&[f64], &[f64])> {
        match &self.data {
            FieldData::Vector { u, v } => Ok((u, v)),
            FieldData::Scalar(_) => Err(Error::FieldKind { expected: "vector" }),
        }
    }

    /// Node values flattened latitude-major, vector components interleaved `(U, V)`.
    pub fn to_interleaved(&self) -> Vec<f64> {
        match &self.data {
            FieldData::Scalar(t) => t.clone(),
            FieldData::Vector { u, v } => u.iter().zip(v).flat_map(|(a, b)| [*a, *b]).collect(),
        }
    }

    pub fn from_interleaved(kind: FieldKind, n_lat: usize, n_lon: usize, data: &[f64]) -> Result<Self> {
        match kind {
            FieldKind::Scalar => SphereField::scalar(n_lat, n_lon, data.to_vec()),
            FieldKind::Vector => {
                if data.len() != 2 * n_lat * n_lon {
                    return Err(Error::GridMismatch(format!(
                        "{} values for a {n_lat}x{n_lon} vector grid",
                        data.len()
                    )));
                }
                let u = data.iter().step_by(2).copied().collect();
                let v = data.iter().skip(1).step_by(2).copied().collect();
                SphereField::vector(n_lat, n_lon, u, v)
            }
        }
    }

    pub fn same_grid(&self, other: &SphereField) -> bool {
        self.n_lat == other.n_lat && self.n_lon == other.n_lon
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(&self, other: &SphereField) -> Result<f64> {
        if !self.same_grid(other) || self.kind() != other.kind() {
            return Err(Error::GridMismatch("fields differ in grid or kind".into()));
        }
        Ok(self
            .to_interleaved()
            .iter()
            .zip(other.to_interleaved())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Bilinear value at `(longitude, colatitude)`, periodic in longitude.
    /// Returns `(T, 0)` for scalars and `(U, V)` for vectors.
    pub fn interpolate(&self, alpha: f64, beta: f64) -> (f64, f64) {
        let x = alpha.rem_euclid(2.0 * PI) * self.n_lon as f64 / (2.0 * PI);
        let y = (beta.clamp(0.0, PI) * (self.n_lat - 1) as f64 / PI).min((self.n_lat - 1) as f64);
        let j0 = (x.floor() as usize) % self.n_lon;
        let j1 = (j0 + 1) % self.n_lon;
        let tx = x - x.floor();
        let k0 = (y.floor() as usize).min(self.n_lat - 2);
        let k1 = k0 + 1;
        let ty = y - k0 as f64;
        let blend = |vals: &[f64]| {
            let v00 = vals[self.index(k0, j0)];
            let v01 = vals[self.index(k0, j1)];
            let v10 = vals[self.index(k1, j0)];
            let v11 = vals[self.index(k1, j1)];
            (1.0 - ty) * ((1.0 - tx) * v00 + tx * v01) + ty * ((1.0 - tx) * v10 + tx * v11)
        };
        match &self.data {
            FieldData::Scalar(t) => (blend(t), 0.0),
            FieldData::Vector { u, v } => (blend(u), blend(v)),
        }
    }
}

#[inline]
fn colat(n_lat: usize, k: usize) -> f64 {
    PI * k as f64 / (n_lat - 1) as f64
}

#[inline]
fn lon(n_lon: usize, j: usize) -> f64 {
    2.0 * PI * j as f64 / n_lon as f64
}
