use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty dataset: at least one sample is required")]
    EmptyDataset,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid action {action}: environment has {action_count} actions")]
    InvalidAction { action: usize, action_count: usize },

    #[error("step called on a finished episode; call reset first")]
    SteppedFinishedEpisode,

    #[error("unknown environment '{0}' (known: {known})", known = crate::env::EnvKind::names().join(", "))]
    UnknownEnvironment(String),

    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
