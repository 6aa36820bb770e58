use thiserror::Error;

use crate::solver::SolveReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector is empty")]
    EmptyVector,

    #[error("entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },

    #[error("entry {index} is not finite")]
    NonFiniteEntry { index: usize },

    #[error("entries sum to zero")]
    ZeroMass,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("exponent {exponent} at ({row}, {col}) exceeds the overflow guard")]
    ExponentOverflow { row: usize, col: usize, exponent: f64 },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("transport plan has a negative or non-finite entry at ({row}, {col})")]
    NegativeInput { row: usize, col: usize },

    #[error("eps' = {0} outside (0, 8]")]
    EpsPrimeOutOfRange(f64),

    #[error("support is not strictly increasing at position {0}")]
    UnsortedSupport(usize),

    #[error("graph is disconnected")]
    DisconnectedGraph,

    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("agent {reader} cannot read the gradient of non-neighbor {source_agent}")]
    NotNeighbor { reader: usize, source_agent: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("iteration budget exhausted after {} iterations (violation {:.3e})", .0.iterations, .0.final_violation)]
    MaxItersExceeded(Box<SolveReport>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
