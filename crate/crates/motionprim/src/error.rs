//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("degenerate shape: {0}")]
    DegenerateShape(String),
    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),
    #[error("incompatible shapes: {0}")]
    IncompatibleShapes(String),
    #[error("cardinality mismatch: {0}")]
    CardinalityMismatch(String),
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("unknown region tag: {0}")]
    UnknownRegionTag(String),
    #[error("unknown motion class: {0}")]
    UnknownClass(String),
    #[error("empty library")]
    EmptyLibrary,
    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
