use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error(transparent)]
    Core(#[from] so3eq_core::Error),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("tape has already been consumed by a backward pass")]
    TapeConsumed,

    #[error("non-finite loss at epoch {epoch}, step {step}: {value}")]
    NonFinite { epoch: usize, step: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, NnError>;
