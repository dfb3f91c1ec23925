use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |A - A^dag| = {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("operator is not between 0 and I (eigenvalue {0:.3e})")]
    NotContraction(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension cap exceeded: {dim} > {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code used in CLI error records.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::NotHermitian(_) => "not_hermitian",
            Error::InvalidState(_) => "invalid_state",
            Error::NotContraction(_) => "not_contraction",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::DimensionCap { .. } => "dimension_cap",
            Error::Parse(_) => "parse_error",
            Error::Io(_) => "io_error",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
