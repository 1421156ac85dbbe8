use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid vehicle parameters: {0}")]
    InvalidParams(String),

    /// A vertical axle force became non-positive (the vehicle would tip).
    #[error("outside model validity: {0}")]
    InvalidRegime(String),

    #[error("singular velocity {velocity} m/s (minimum {minimum} m/s)")]
    SingularVelocity { velocity: f64, minimum: f64 },

    #[error("trajectory diverged at t = {time} s")]
    TrajectoryDiverged { time: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("context set is empty")]
    EmptyContext,

    #[error("embedding set is empty")]
    EmptySet,

    #[error("series of length {len} is too short (need at least {min})")]
    TooShortSeries { len: usize, min: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed manifest line {line}: {reason}")]
    MalformedManifest { line: usize, reason: String },

    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("{path}: line {line} has {found} columns, expected {expected}")]
    ChannelCount {
        path: String,
        line: usize,
        found: usize,
        expected: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("bad checkpoint: {0}")]
    Checkpoint(String),

    #[error("training diverged at step {step}: loss is {loss}")]
    Divergence { step: usize, loss: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
