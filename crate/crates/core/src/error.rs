//! Error type shared across the crate.

use thiserror::Error;

/// Errors reported by table validation, matrix operations, and extraction.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated (dimension mismatch,
    /// out-of-range qubit count, non-unitary input, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A correlator table is missing the entry for the named Pauli pair.
    #[error("correlator table is missing entry ({a}, {b})")]
    MissingEntry { a: String, b: String },

    /// Input data failed validation (value out of range, duplicate entry,
    /// malformed matrix, ...).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// A PDM marginal failed density-matrix validation.
    #[error("corrupt PDM: {0}")]
    CorruptPdm(String),

    /// The data cannot be reproduced by any state + linear-map pair under
    /// either time labeling (extraction residual above threshold).
    #[error("corrupt data: {0}")]
    CorruptData(String),

    /// The state is rank deficient; the full-rank solver cannot run.
    #[error("rank-deficient state: {0}; use the pseudoinverse extraction")]
    RankDeficient(String),

    /// The operation is defined only for other inputs (e.g. arrow measure on
    /// projected-mode extractions).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
