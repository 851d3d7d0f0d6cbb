use thiserror::Error;

use crate::model::LundbergReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model parameter failed validation at construction or load time.
    #[error("invalid model: {key}: {reason}")]
    InvalidModel { key: String, reason: String },

    /// An argument fell outside the domain of the function being evaluated.
    #[error("{what}: argument {value} outside admissible domain ({bound})")]
    Domain {
        what: &'static str,
        value: f64,
        bound: String,
    },

    #[error("Lundberg condition not satisfied: {}", .0.explain())]
    Lundberg(LundbergReport),

    #[error("root bracket failure for {what}: no sign change on [{lo}, {hi}]")]
    Bracket { what: String, lo: f64, hi: f64 },

    /// A computed object violated one of its structural invariants.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("quadrature did not converge on [{lo}, {hi}]: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature {
        lo: f64,
        hi: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Malformed model document; the message carries line and column.
    #[error(transparent)]
    Parse(#[from] serde_json::Error),
}
