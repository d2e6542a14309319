use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GptError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("word label {label} out of range 1..={k}")]
    BadLabel { label: usize, k: usize },

    #[error("index {index} out of range for {what} (len {len})")]
    BadIndex {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("outcome weight {0} is not positive; this is an inconsistency witness")]
    NonPositiveWeight(Scalar),

    #[error("tensor has {0} subsystems; expected 2")]
    NotBipartite(usize),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("matrices are not stochastic: {0}")]
    NotStochastic(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("wrong teleportation direction: expected {expected}")]
    WrongDirection { expected: &'static str },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, GptError>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(GptError::DimensionMismatch { expected, found })
    }
}
