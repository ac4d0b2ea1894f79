//! Harmonic analysis on the rotation group SO(3).
//!
//! The crate is organised bottom-up:
//!
//! * [`wigner`] builds the Wigner d- and D-matrices and the `Δ = d(π/2)` matrices
//!   that diagonalise them.
//! * [`signals`] holds Euler grids, spatial and spectral signal containers, sphere
//!   fields and the conversions between sphere fields and their associated
//!   functions on SO(3).
//! * [`so3fft`] implements the forward/inverse Fourier transform on SO(3), both as a
//!   direct quadrature and as a fast transform built from ordinary FFTs.
//! * [`spectral_ops`] collects the linear operators that act on spectra: left
//!   convolution, right covariance, smoothing, pooling and exact rotation.
//!
//! Coefficients follow the expansion `x = Σ x̂ˡ₋ₘ,₋ₙ Dˡₘₙ`, so `x̂ˡₘₙ` multiplies
//! `e^{i(mα + nγ)}` and a signal of equivariance order `p` lives in coefficient
//! column `n = -p` (see [`signals::column_of_order`]).

pub mod error;
pub mod signals;
pub mod so3fft;
pub mod spectral_ops;
pub mod wigner;

pub use error::{Error, Result};
pub use num_complex::Complex64;
