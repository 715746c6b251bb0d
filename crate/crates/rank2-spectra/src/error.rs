//! Library error type.

use thiserror::Error;

/// Errors raised by constructors and exports.
#[derive(Debug, Error)]
pub enum Error {
    /// A point failed the signed boundary-factor test of its character domain.
    #[error("point ({0}, {1}) lies outside the {2} domain")]
    DomainViolation(f64, f64, &'static str),

    /// A Verlinde entry was not within the guard band of an integer.
    #[error("fusion coefficient {value} at ({row}, {col}) is not integral within {guard}")]
    Integrality {
        row: usize,
        col: usize,
        value: f64,
        guard: f64,
    },

    #[error("graphs do not share a vertex set")]
    VertexSetMismatch,

    #[error("generator {generator} is not available for {group}")]
    InvalidGenerator { group: String, generator: String },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("weight ({0}, {1}) is outside the level-{2} alcove")]
    OutsideAlcove(u32, u32, u32),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
