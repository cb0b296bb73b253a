use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("tuple is not hermitian")]
    NotHermitian,
    #[error("tuple is not hyperbolic: {0}")]
    NotHyperbolic(String),
    #[error("hyperbolicity could not be established: {0}")]
    Inconclusive(String),
    #[error("degenerate: {0}")]
    Degenerate(String),
    #[error("unresolved: {0}")]
    Unresolved(String),
    #[error("non-convergent: {0}")]
    NonConvergent(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by a refused precondition on the tuple itself.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian | Error::NotHyperbolic(_) | Error::Inconclusive(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
