//! Fourier transform on SO(3).
//!
//! Both directions follow `x = Σ x̂ˡ₋ₘ,₋ₙ Dˡₘₙ`, equivalently
//! `x̂ˡₘₙ = (2l+1)⟨x, Dˡ₋ₘ,₋ₙ⟩` under the unit Haar measure. The direct transforms
//! are plain quadrature and serve as oracles; the fast ones reduce everything to
//! ordinary FFTs plus a contraction with the `Δ` matrices.

mod direct;
mod plan;
mod table;
mod weights;

pub use direct::{evaluate, ft_direct, ift_direct};
pub use plan::{ft_fast, ift_fast, BetaExtension, FftPlan};
pub use table::BetaTable;
pub use weights::{beta_weights, dst_weights, interval_weights, WeightTable};
