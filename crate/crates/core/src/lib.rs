//! Gaze + pinch input fusion.
//!
//! The eyes pick the target at the instant a thumb–index pinch lands; the
//! hand then does all of the manipulation. This crate holds the deterministic
//! engine behind that technique along with the tooling around it:
//!
//! - [`geometry`]: yaw/pitch chart math.
//! - [`fixation`]: online dispersion-threshold fixation detection.
//! - [`scene`]: targets, buffered hit-testing and direct-reach lookup.
//! - [`transfer`]: control-display mappings and pan/zoom about a pivot.
//! - [`fusion`]: the per-hand binding state machine.
//! - [`trace`]: trace files, synthetic trace generation, replay, metrics.
//! - [`service`]: the JSON session protocol used by live clients.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fixation;
pub mod fusion;
pub mod geometry;
pub mod json;
pub mod rng;
pub mod scene;
pub mod service;
pub mod trace;
pub mod transfer;

/// Timestamps and durations, in integer milliseconds.
pub type Millis = u64;

pub use error::{Error, Result};
pub use fixation::{Fixation, FixationConfig, FixationDetector, FixationEvent, GazeSample};
pub use fusion::{
    BindingRecord, Engine, EventPayload, FusionConfig, Hand, HandSample, Input, InteractionEvent,
    InteractionMode, Phase, Resolution,
};
pub use geometry::{Direction, HandPosition};
pub use scene::{Scene, Target, TargetKind};
pub use transfer::{TransferConfig, TransferMode, ViewTransform};
