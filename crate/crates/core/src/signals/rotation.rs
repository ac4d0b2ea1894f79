use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::Matrix3;

use crate::error::{Error, Result};

const ROTATION_TOLERANCE: f64 = 1e-12;
const GIMBAL_TOLERANCE: f64 = 1e-12;

/// A proper rotation `A ∈ SO(3)`; its columns form a positively oriented
/// orthonormal basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    /// Validates orthogonality and orientation within `1e-12`.
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let orthogonality = (m.transpose() * m - Matrix3::identity()).amax();
        let det = m.determinant();
        if !(orthogonality <= ROTATION_TOLERANCE) || !((det - 1.0).abs() <= ROTATION_TOLERANCE) {
            return Err(Error::InvalidRotation { orthogonality, det });
        }
        Ok(RotationMatrix(m))
    }

    pub fn identity() -> Self {
        RotationMatrix(Matrix3::identity())
    }

    /// Positive rotation by `theta` about the z-axis.
    pub fn z(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        RotationMatrix(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
    }

    /// Positive rotation by `theta` about the y-axis.
    pub fn y(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        RotationMatrix(Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c))
    }

    pub fn from_euler(alpha: f64, beta: f64, gamma: f64) -> Self {
        euler_to_matrix(alpha, beta, gamma)
    }

    pub fn to_euler(&self) -> (f64, f64, f64) {
        euler_angles(&self.0)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        RotationMatrix(self.0.transpose())
    }

    /// `A_{ij}` with 1-based indices as in the usual matrix notation.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.0[(i - 1, j - 1)]
    }
}

impl Mul for RotationMatrix {
    type Output = RotationMatrix;

    fn mul(self, rhs: RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * rhs.0)
    }
}

impl Mul for &RotationMatrix {
    type Output = RotationMatrix;

    fn mul(self, rhs: &RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * rhs.0)
    }
}

/// `Z(α)Y(β)Z(γ)` written out entry by entry.
pub fn euler_to_matrix(alpha: f64, beta: f64, gamma: f64) -> RotationMatrix {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let (sg, cg) = gamma.sin_cos();
    RotationMatrix(Matrix3::new(
        ca * cb * cg - sa * sg,
        -cg * sa - ca * cb * sg,
        ca * sb,
        ca * sg + cb * cg * sa,
        ca * cg - cb * sa * sg,
        sa * sb,
        -cg * sb,
        sb * sg,
        cb,
    ))
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

fn euler_angles(a: &Matrix3<f64>) -> (f64, f64, f64) {
    let a33 = a[(2, 2)].clamp(-1.0, 1.0);
    let sin_beta = (a[(0, 2)].powi(2) + a[(1, 2)].powi(2)).sqrt();
    if sin_beta <= GIMBAL_TOLERANCE {
        // gimbal locus: only α ± γ is defined, take γ = 0
        if a33 > 0.0 {
            (wrap_angle(a[(1, 0)].atan2(a[(0, 0)])), 0.0, 0.0)
        } else {
            (wrap_angle((-a[(1, 0)]).atan2(-a[(0, 0)])), PI, 0.0)
        }
    } else {
        let alpha = a[(1, 2)].atan2(a[(0, 2)]);
        let gamma = a[(2, 1)].atan2(-a[(2, 0)]);
        let beta = sin_beta.atan2(a33);
        (wrap_angle(alpha), beta, wrap_angle(gamma))
    }
}

/// Euler angles with `β ∈ [0, π]` and `α, γ ∈ [0, 2π)`; `γ = 0` on the gimbal locus.
pub fn matrix_to_euler(a: &RotationMatrix) -> Result<(f64, f64, f64)> {
    RotationMatrix::new(a.0)?;
    Ok(euler_angles(&a.0))
}
