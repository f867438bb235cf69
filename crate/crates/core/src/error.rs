use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid tree encoding {0:?}")]
    InvalidTreeEncoding(String),
    #[error("node id {id} out of range for a tree with {len} nodes")]
    InvalidNode { id: usize, len: usize },
    #[error("operation requires an internal root, got a single leaf")]
    LeafRoot,
    #[error("resonance function overflows 128-bit arithmetic at ({0}, {1}, {2})")]
    SigmaOverflow(i64, i64, i64),
    #[error("index assignment is not admissible: {0}")]
    Inadmissible(String),
    #[error("index assignment belongs to a different tree")]
    TreeMismatch,
    #[error("expected {expected} leaf sequences, got {got}")]
    LeafCountMismatch { expected: usize, got: usize },
    #[error("cutoff mismatch: expected {expected}, got {got}")]
    CutoffMismatch { expected: usize, got: usize },
    #[error("time {0} outside [0, 1]")]
    TimeOutOfRange(f64),
    #[error("times must be nondecreasing")]
    UnorderedTimes,
    #[error("initial data is not real-field (Hermitian defect {0:e})")]
    NonHermitian(f64),
    #[error("step {dt} violates stability guard dt <= {limit}")]
    StabilityGuard { dt: f64, limit: f64 },
    #[error("quadrature grid rejected: {0}")]
    GridRejected(String),
    #[error("invalid norm index: {0}")]
    InvalidNorm(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
