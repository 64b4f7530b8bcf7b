use crate::core::ResponseKind;
use thiserror::Error;

/// Crate-wide error type.
///
/// Errors split into two families, mirrored by the CLI exit codes:
/// configuration/validation problems (exit 1) and runtime/data problems
/// (exit 2).
#[derive(Debug, Error)]
pub enum Error {
    #[error("probability out of range [0, 1]: {0}")]
    InvalidProbability(f64),

    #[error("non-finite input: {0}")]
    NonFinite(f64),

    #[error("feature schema mismatch: expected {expected} features, got {got}")]
    SchemaMismatch { expected: usize, got: usize },

    #[error("embedding dimension mismatch: schema expects {expected}, item has {got}")]
    EmbeddingDim { expected: usize, got: usize },

    #[error("item type index {index} out of range for {num_types} configured types")]
    TypeIndex { index: usize, num_types: usize },

    #[error("training data contains a single label class")]
    SingleClass,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("missing prediction for configured response {0}")]
    MissingResponse(ResponseKind),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("action {action} out of range for window of {window} candidates")]
    ActionOutOfRange { action: usize, window: usize },

    #[error("episode already finished")]
    EpisodeDone,

    #[error("logged propensity must be positive, got {0}")]
    ZeroPropensity(f64),

    #[error("objective dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point contains a non-finite objective value")]
    NonFinitePoint,

    #[error(
        "episode log was produced under config hash {logged}, current config hashes to {current}"
    )]
    ConfigHashMismatch { logged: String, current: String },

    #[error(
        "logged window does not match regenerated candidates at session {session}, slot {slot}"
    )]
    WindowMismatch { session: usize, slot: usize },

    #[error("malformed data: {0}")]
    MalformedData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit code for this error: 1 for validation errors, 2 for
    /// runtime/data errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_)
            | Error::InvalidProbability(_)
            | Error::SchemaMismatch { .. }
            | Error::EmbeddingDim { .. }
            | Error::TypeIndex { .. }
            | Error::MissingResponse(_)
            | Error::DimensionMismatch { .. }
            | Error::EmptyInput(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
