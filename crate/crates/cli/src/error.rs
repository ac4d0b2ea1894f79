use so3eq_core::Error as CoreError;
use so3eq_nn::data::DataError;
use so3eq_nn::NnError;

/// Process exit status for each failure class.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const IO: i32 = 3;
    pub const NUMERIC: i32 = 4;
    pub const SHAPE: i32 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("shape error: {0}")]
    Shape(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Io(_) => exit::IO,
            CliError::Numeric(_) => exit::NUMERIC,
            CliError::Shape(_) => exit::SHAPE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidRotation { .. } | CoreError::InvalidArgument(_) => CliError::Config(e.to_string()),
            _ => CliError::Shape(e.to_string()),
        }
    }
}

impl From<NnError> for CliError {
    fn from(e: NnError) -> Self {
        match e {
            NnError::Core(c) => c.into(),
            NnError::Shape(_) => CliError::Shape(e.to_string()),
            NnError::NonFinite { .. } | NnError::TapeConsumed => CliError::Numeric(e.to_string()),
            NnError::Config(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::Core(c) => c.into(),
            DataError::Nn(n) => (*n).into(),
            // unreadable, truncated or foreign files are all input problems
            _ => CliError::Io(e.to_string()),
        }
    }
}
