use thiserror::Error;

/// Errors raised by the algebra engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KsError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A coefficient was requested below the truncation floor; its value is unknown.
    #[error("coefficient at exponent {exponent} is below the truncation floor {floor}")]
    Truncation { exponent: i64, floor: i64 },

    #[error("not invertible: {0}")]
    NotInvertible(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An element was expected to lie in the catalog (loop) algebra but does not.
    #[error("projection onto the catalog span failed: {0}")]
    Projection(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// An internal consistency check failed. Always a bug.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, KsError>;
