//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across graph construction, modularity
/// operators, the eigensolver, subspace geometry, block models, detection
/// and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph must have at least one node")]
    ZeroNodes,

    #[error("node index {index} out of range for graph with {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("edge ({i}, {j}) has nonpositive weight {w}")]
    NonpositiveWeight { i: usize, j: usize, w: f64 },

    #[error("graph has zero volume (no edges)")]
    EmptyGraph,

    #[error("zero vertex measure: {0}")]
    ZeroMeasure(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric within tolerance")]
    NotSymmetric,

    #[error("eigensolver failed to converge after {iterations} restarts")]
    NoConvergence { iterations: usize },

    #[error("frame columns are not orthonormal (deviation {deviation:.3e})")]
    FrameNotOrthonormal { deviation: f64 },

    #[error("frame must have between 1 and n-1 columns, got {k} for dimension {n}")]
    BadFrameWidth { k: usize, n: usize },

    #[error("operator has zero Frobenius norm; angles are undefined")]
    ZeroMatrix,

    #[error("full Frobenius norm of the operator is unavailable at this size; bound evaluation requires the dense path")]
    InsufficientSpectrum,

    #[error("|lambda_k| = {value:.3e} is numerically zero; eigenspace bounds are undefined")]
    ZeroLeadingEigenvalue { value: f64 },

    #[error("rank {k} out of bounds for {n}x{n} matrix")]
    InvalidRank { k: usize, n: usize },

    #[error("need at least two eigenvalues to form ratios")]
    TooFewEigenvalues,

    #[error("cannot form {groups} clusters from {n} points")]
    TooManyGroups { groups: usize, n: usize },

    #[error("block model has zero expected volume")]
    ZeroNu,

    #[error("block {block} has zero expected degree; normalized mode is undefined")]
    ZeroDelta { block: usize },

    #[error("partition sizes do not conform to the block structure")]
    NonconformalPartition,

    #[error("connectivity entry {value} at ({i}, {j}) is not a probability; sampling requires entries in [0, 1]")]
    ProbabilityOutOfRange { i: usize, j: usize, value: f64 },

    #[error("invalid block model spec: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
}

impl Error {
    /// True for failures of the numerical machinery (as opposed to bad
    /// input data); the CLI maps these to a distinct exit code.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::ZeroLeadingEigenvalue { .. }
                | Error::InsufficientSpectrum
        )
    }
}
