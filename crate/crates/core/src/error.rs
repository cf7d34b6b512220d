use thiserror::Error;

use crate::grid::FieldVector;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid nonlinearity: {0}")]
    InvalidSpec(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("no sign change of J_{order} found below x = {cap}")]
    BracketNotFound { order: f64, cap: f64 },

    /// The solver met a non-finite energy. The offending iterate is kept for inspection.
    #[error("non-finite energy at iteration {iteration}")]
    NonFiniteEnergy {
        iteration: usize,
        iterate: Box<FieldVector>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
