use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("random variables live on different probability spaces")]
    SpaceMismatch,
    #[error("invalid probability space: {0}")]
    InvalidSpace(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid N-function: {0}")]
    InvalidNFunction(String),
    #[error("LP solver failure: {0}")]
    Solver(String),
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
    #[error("market file: {0}")]
    Format(String),
}
