use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the lip event library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid landmark data: {0}")]
    InvalidLandmarks(String),

    #[error("degenerate landmark configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("smoothing window must be odd and at least 1, got {0}")]
    InvalidWindow(usize),

    #[error("landmark count mismatch: expected {expected}, found {found}")]
    CountMismatch { expected: usize, found: usize },

    #[error("landmark {index} coincides with the reference sphere center")]
    LandmarkAtCenter { index: usize },

    #[error("no landmarks on the {0} side of the reference sphere")]
    EmptySide(&'static str),

    #[error(
        "sequence too short: {frames} frames in the search window, at least {required} needed"
    )]
    SequenceTooShort { frames: usize, required: usize },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("event was not detected")]
    MissingEvent,

    #[error("empty input")]
    EmptyInput,

    #[error("unmatched sequence: {0}")]
    UnmatchedSequence(String),

    #[error("{path}: row {row}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
