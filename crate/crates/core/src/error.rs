use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid triplet: {0}")]
    InvalidTriplet(String),

    #[error("invalid array: {0}")]
    InvalidArray(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// First moment is zero where a non-zero mean is required.
    #[error("zero mean: the first moment vanishes")]
    ZeroMean,

    #[error("series has zero constant term")]
    ZeroConstantTerm,

    /// The requested operation has no closed form for the given inputs.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    pub fn is_unsupported(&self) -> bool {
        matches!(self, Error::Unsupported(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
