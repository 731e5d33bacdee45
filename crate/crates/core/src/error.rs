//! Crate-wide error type with module-qualified messages.

use crate::eep::EepReport;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("graph: parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("graph: duplicate node identifier {0:?}")]
    DuplicateNode(String),

    #[error("graph: duplicate undirected edge {0:?} - {1:?}")]
    DuplicateEdge(String, String),

    #[error("graph: self-loop on node {0:?}")]
    SelfLoop(String),

    #[error("graph: unknown node {0:?}")]
    UnknownNode(String),

    #[error("graph: non-finite weight on edge {0:?} - {1:?}")]
    NonFiniteWeight(String, String),

    #[error("graph: {op} requires an unsigned graph")]
    SignedGraph { op: &'static str },

    #[error("graph: {op} requires a connected graph")]
    Disconnected { op: &'static str },

    #[error("graph: node {0:?} has non-positive degree")]
    ZeroDegree(String),

    #[error("generate: probabilities must satisfy 0 <= p_out < p_in <= 1 (got p_in={p_in}, p_out={p_out})")]
    InvalidProbability { p_in: f64, p_out: f64 },

    #[error("partition: {0}")]
    InvalidPartition(String),

    #[error("partition: covers {got} nodes, expected {expected}")]
    PartitionMismatch { expected: usize, got: usize },

    #[error("spectral: matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("spectral: eigensolver failed to converge within {0} iterations")]
    EigenFailed(usize),

    #[error("spectral: all eigenvalues are zero")]
    AllZeroEigenvalues,

    #[error("spectral: partition has {got} cells, expected k={expected}")]
    KMismatch { expected: usize, got: usize },

    #[error("dynamics: invalid time grid: {0}")]
    TimeGrid(String),

    #[error("dynamics: invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("dynamics: step size {dt} exceeds stability limit {max}")]
    StepSize { dt: f64, max: f64 },

    #[error("eep: partition is not an external equitable partition (max violation {})", .0.max_violation)]
    NotAnEep(EepReport),

    #[error("balance: graph is not structurally balanced (polarized limit is the zero vector)")]
    Unbalanced,

    #[error("balance: sigma vector has length {got}, expected {expected}")]
    SigmaMismatch { expected: usize, got: usize },

    #[error("balance: opinion matrix is not symmetric")]
    AsymmetricOpinions,

    #[error("stability: {op} is only defined for the discrete-time family")]
    DiscreteOnly { op: &'static str },

    #[error("stability: discrete Markov time must be a non-negative integer (got {0})")]
    NonIntegerTime(f64),

    #[error("stability: Markov time must be non-negative (got {0})")]
    NegativeTime(f64),

    #[error("stability: alpha must lie in [0, 1] (got {0})")]
    InvalidAlpha(f64),

    #[error("optimize: {0}")]
    Optimize(String),
}

impl Error {
    /// True when the error reflects bad input rather than a numerical failure.
    /// The CLI maps input errors to exit code 2 and numerical ones to 3.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::EigenFailed(_) | Error::AllZeroEigenvalues)
    }
}
