//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by model construction, extraction and reconstruction.
#[derive(Debug, Error)]
pub enum Error {
    /// Signature not in the supported set (1,1,1) / (1,1,-1).
    #[error("unsupported signature ({0}, {1}, {2}); expected (1,1,1) or (1,1,-1)")]
    UnsupportedSignature(i8, i8, i8),

    /// A point left the coordinate domain D x R (lambda <= 0).
    #[error("point ({x}, {y}, {z}) is outside the model domain (lambda = {lambda})")]
    OutsideDomain { x: f64, y: f64, z: f64, lambda: f64 },

    /// Requested a family model with tau = 0; only the limit metric exists.
    #[error("tau = 0 gives a product-limit metric, not a metric Lie group")]
    ProductLimit,

    /// Covering maps exist only for the SU(2) / SL2(R) sign patterns.
    #[error("no covering map for sign pattern c = ({0}, {1}, {2})")]
    NoCoverMap(f64, f64, f64),

    /// Induced metric degenerate (or partial derivative lightlike).
    #[error("degenerate induced metric at (u, v) = ({u}, {v}): {what}")]
    Degenerate { u: f64, v: f64, what: String },

    /// Grid too small for the finite-difference stencils.
    #[error("grid {nu} x {nv} too small; need at least {need} points per direction")]
    GridTooSmall { nu: usize, nv: usize, need: usize },

    /// A mathematical precondition of a reconstruction theorem failed.
    #[error("precondition `{condition}` violated: {detail}")]
    Precondition { condition: String, detail: String },

    /// Numerical integration failed (typically domain exit mid-sweep).
    #[error("integration failed at (u, v) = ({u}, {v}): {what}")]
    Integration { u: f64, v: f64, what: String },

    /// Malformed input data (NaN, ragged grid, bad header, ...).
    #[error("data integrity: {0}")]
    Data(String),

    /// I/O error while reading or writing grid files.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization error for manifests and model specs.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn precondition(condition: &str, detail: impl Into<String>) -> Self {
        Error::Precondition {
            condition: condition.to_string(),
            detail: detail.into(),
        }
    }
}
