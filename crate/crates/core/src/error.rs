use thiserror::Error;

/// Errors raised by the orthogonalization kernels and the containers they
/// operate on. Column and block indices are 1-based.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("column {0} is linearly dependent on the preceding columns")]
    DependentVector(usize),
    #[error("block {0} is linearly dependent on the preceding blocks")]
    DependentBlock(usize),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("non-finite entry at flat index {0}")]
    NonFinite(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("expected {expected} packed coefficients for {n_vectors} vectors, found {found}")]
    CoefficientCount {
        n_vectors: usize,
        expected: usize,
        found: usize,
    },
    #[error("keep must lie in [1, {n}], got {keep}")]
    KeepOutOfRange { keep: usize, n: usize },
    #[error("tolerance must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// The 1-based index of the offending vector or block, for dependence errors.
    pub fn dependent_index(&self) -> Option<usize> {
        match *self {
            Error::DependentVector(n) | Error::DependentBlock(n) => Some(n),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
