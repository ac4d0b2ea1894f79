use thiserror::Error;

/// Errors raised by the harmonic-analysis primitives.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("band limit mismatch: expected {expected}, found {found}")]
    BandLimitMismatch { expected: usize, found: usize },

    #[error("grid {n_alpha}x{n_beta}x{n_gamma} is too coarse for band limit {band_limit}")]
    GridTooCoarse {
        n_alpha: usize,
        n_beta: usize,
        n_gamma: usize,
        band_limit: usize,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("equivariance order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: i32, found: i32 },

    #[error("order {order} exceeds band limit {band_limit}")]
    OrderOutOfRange { order: i32, band_limit: usize },

    #[error("signal is not in X_{order}: off-column residue {residue:.3e}")]
    NotInSubspace { order: i32, residue: f64 },

    #[error("not a rotation matrix: orthogonality error {orthogonality:.3e}, det {det}")]
    InvalidRotation { orthogonality: f64, det: f64 },

    #[error("field kind mismatch: expected {expected}")]
    FieldKind { expected: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
