use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// Rejection sampling gave up because almost nothing is free.
    #[error("degenerate world: rejection acceptance rate below {0:e}")]
    DegenerateWorld(f64),

    #[error("exact-disjoint measure requires pairwise disjoint obstacles")]
    OverlappingObstacles,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("cost field value {value} outside declared bounds [{lower}, {upper}]")]
    FieldOutOfBounds { value: f64, lower: f64, upper: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
