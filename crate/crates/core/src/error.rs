use thiserror::Error;

use crate::Millis;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate hand distance: {0} m")]
    DegenerateHandDistance(f64),

    #[error("empty window")]
    EmptyWindow,

    #[error("non-monotonic input: t={got} after t={previous}")]
    NonMonotonic { previous: Millis, got: Millis },

    #[error("invalid target depth: {0} m")]
    InvalidDepth(f64),

    #[error("invalid scale ratio: {0}")]
    InvalidScale(f64),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("scene parse error at line {line}: {message}")]
    SceneParse { line: usize, message: String },

    #[error("invalid target \"{target}\": {message}")]
    SceneValidation { target: String, message: String },

    #[error("invalid scene: {0}")]
    Scene(String),

    #[error("trace error at line {line}: {message}")]
    TraceParse { line: usize, message: String },

    #[error("unknown target \"{0}\"")]
    UnknownTarget(String),

    #[error("hand sample at t={0} reports a pinch while untracked")]
    PinchWithoutTracking(Millis),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("config locked during gesture")]
    ConfigLocked,

    #[error("two-hand update requested outside a two-hand gesture")]
    NotInTwoHand,

    #[error("evaluation mismatch: {0}")]
    Evaluation(String),
}
