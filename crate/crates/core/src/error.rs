//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong while building geometry, fields or flows.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value in {0}")]
    NonFiniteInput(&'static str),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("singular matrix (pivot {pivot:e} below threshold {threshold:e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("degenerate simplex (|volume| = {volume:e}, threshold {threshold:e})")]
    DegenerateSimplex { volume: f64, threshold: f64 },

    #[error("degenerate cone triangulation: simplices {indices:?} have vanishing volume")]
    DegenerateTriangulation { indices: Vec<usize> },

    #[error("polytope volume {volume:e} is below threshold {threshold:e}")]
    ZeroVolume { volume: f64, threshold: f64 },

    #[error("invalid similarity: {0}")]
    InvalidSimilarity(String),

    #[error("matrix A is not a scalar plus a skew-symmetric matrix (asymmetry {asymmetry:e})")]
    InvalidMobiusField { asymmetry: f64 },

    #[error("flow collapsed the polytope volume at t = {time}")]
    VolumeCollapse { time: f64 },

    #[error("flow produced non-finite coordinates at t = {time}")]
    NonFinite { time: f64 },

    #[error("point coincides with the inversion center")]
    PoleHit,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
