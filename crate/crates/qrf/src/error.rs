use thiserror::Error;

#[derive(Debug, Error)]
pub enum QrfError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("support lies outside the code space (weight {0:.3e} outside)")]
    OutsideCodeSpace(f64),
    #[error("Fock truncation inadequate: population {0:.3e} near the cutoff")]
    TruncationLeak(f64),
    #[error("function is not a class function (deviation {0:.3e})")]
    NotClassFunction(f64),
    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),
    #[error("support outside the relational wedge: {0}")]
    OutsideWedge(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, QrfError>;
