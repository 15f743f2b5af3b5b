use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CsosError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("division by zero in {0}")]
    Singular(String),
    #[error("pole of a Boltzmann weight: {0}")]
    Pole(String),
    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("non-terminating series: {0}")]
    NonTerminating(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("no solution: {0}")]
    NoSolution(String),
}

pub type Result<T> = std::result::Result<T, CsosError>;
