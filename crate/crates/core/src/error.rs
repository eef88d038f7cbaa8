//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A specification or configuration failed validation before any
    /// numerics ran.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// Sampling grid too coarse for the requested mode band.
    #[error("surface grid {got} too coarse for mode band (need at least {need} points per axis)")]
    GridTooCoarse { need: usize, got: usize },

    /// The limit pattern of a conductivity scaling is not covered by the
    /// classification tables.
    #[error("unsupported scaling regime: {0}")]
    UnsupportedRegime(String),

    /// A classification hypothesis failed; names the failing hypothesis.
    #[error("classification hypothesis violated: {0}")]
    HypothesisViolated(String),

    /// Non-finite values appeared while time stepping.
    #[error("solver failure at step {step}: {reason}")]
    SolverFailure { step: usize, reason: String },

    /// Two trajectories cannot be compared.
    #[error("trajectory mismatch: {0}")]
    TrajectoryMismatch(String),

    /// A solver invariant was violated (reported, never silently ignored).
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
