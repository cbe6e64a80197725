use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M^H| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("state vector has norm {norm} > 1")]
    OutsideBall { norm: f64 },

    #[error("element is not positive (margin {margin:e})")]
    NotPositive { margin: f64 },

    #[error("{quantity} has imaginary residue {residue:e}; scalar-product convention fault")]
    ConventionFault { quantity: &'static str, residue: f64 },

    #[error("hypothesis not met: {0}")]
    HypothesisUnmet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for faults that indicate an internal inconsistency rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::ConventionFault { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
