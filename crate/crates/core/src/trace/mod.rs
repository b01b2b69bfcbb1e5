//! Trace files, replay and evaluation.
//!
//! A trace is UTF-8 text with one JSON object per line, either a gaze sample
//! or a hand sample, in non-decreasing time order:
//!
//! ```text
//! {"t":0,"kind":"gaze","yaw":1.5,"pitch":-0.25,"valid":true}
//! {"t":0,"kind":"hand","hand":"right","x":0.15,"y":-0.3,"z":0.45,"pinch":false,"tracked":true}
//! ```
//!
//! Event logs use the same one-object-per-line layout.

mod generate;
mod metrics;

pub use generate::{generate, Dropout, GenConfig, Generated, TrialPlan};
pub use metrics::{evaluate, Expectation, Label, Metrics};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixation::GazeSample;
use crate::fusion::{Engine, FusionConfig, Hand, HandSample, Input, InteractionEvent};
use crate::geometry::{Direction, HandPosition};
use crate::scene::Scene;
use crate::Millis;

pub type TraceRecord = Input;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLine {
    t: Millis,
    kind: String,
    yaw: Option<f64>,
    pitch: Option<f64>,
    valid: Option<bool>,
    hand: Option<Hand>,
    x: Option<f64>,
    y: Option<f64>,
    z: Option<f64>,
    pinch: Option<bool>,
    tracked: Option<bool>,
}

#[derive(Serialize)]
struct GazeLine {
    t: Millis,
    kind: &'static str,
    yaw: f64,
    pitch: f64,
    valid: bool,
}

#[derive(Serialize)]
struct HandLine {
    t: Millis,
    kind: &'static str,
    hand: Hand,
    x: f64,
    y: f64,
    z: f64,
    pinch: bool,
    tracked: bool,
}

fn field<T>(value: Option<T>, name: &str, kind: &str) -> std::result::Result<T, String> {
    value.ok_or_else(|| format!("{kind} record is missing \"{name}\""))
}

impl RawLine {
    fn into_record(self) -> std::result::Result<TraceRecord, String> {
        match self.kind.as_str() {
            "gaze" => {
                if self.hand.is_some() || self.x.is_some() || self.y.is_some() || self.z.is_some()
                    || self.pinch.is_some() || self.tracked.is_some()
                {
                    return Err("gaze record carries hand fields".into());
                }
                let yaw = field(self.yaw, "yaw", "gaze")?;
                let pitch = field(self.pitch, "pitch", "gaze")?;
                Ok(Input::Gaze(GazeSample {
                    t: self.t,
                    dir: Direction::new(yaw, pitch),
                    valid: field(self.valid, "valid", "gaze")?,
                }))
            }
            "hand" => {
                if self.yaw.is_some() || self.pitch.is_some() || self.valid.is_some() {
                    return Err("hand record carries gaze fields".into());
                }
                Ok(Input::Hand(HandSample {
                    t: self.t,
                    hand: field(self.hand, "hand", "hand")?,
                    pos: HandPosition::new(
                        field(self.x, "x", "hand")?,
                        field(self.y, "y", "hand")?,
                        field(self.z, "z", "hand")?,
                    ),
                    pinching: field(self.pinch, "pinch", "hand")?,
                    tracked: field(self.tracked, "tracked", "hand")?,
                }))
            }
            other => Err(format!("unknown kind \"{other}\"")),
        }
    }
}

/// Serializes one record as a single JSON line (no newline).
pub fn record_to_json(record: &TraceRecord) -> String {
    let line = match record {
        Input::Gaze(g) => serde_json::to_string(&GazeLine {
            t: g.t,
            kind: "gaze",
            yaw: g.dir.yaw,
            pitch: g.dir.pitch,
            valid: g.valid,
        }),
        Input::Hand(h) => serde_json::to_string(&HandLine {
            t: h.t,
            kind: "hand",
            hand: h.hand,
            x: h.pos.x,
            y: h.pos.y,
            z: h.pos.z,
            pinch: h.pinching,
            tracked: h.tracked,
        }),
    };
    line.expect("records serialize")
}

/// Parses a single record line.
pub fn record_from_json(text: &str) -> std::result::Result<TraceRecord, String> {
    let raw: RawLine = serde_json::from_str(text).map_err(|e| e.to_string())?;
    raw.into_record()
}

pub fn write_trace(records: &[TraceRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&record_to_json(r));
        out.push('\n');
    }
    out
}

/// Parses a trace, rejecting malformed lines and decreasing timestamps.
/// Blank lines are skipped; line numbers are 1-based.
pub fn parse_trace(text: &str) -> Result<Vec<TraceRecord>> {
    let mut records = Vec::new();
    let mut previous: Option<Millis> = None;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record = record_from_json(line).map_err(|message| Error::TraceParse {
            line: line_no,
            message,
        })?;
        if let Some(prev) = previous {
            if record.t() < prev {
                return Err(Error::TraceParse {
                    line: line_no,
                    message: format!("non-monotonic timestamp {} after {}", record.t(), prev),
                });
            }
        }
        previous = Some(record.t());
        records.push(record);
    }
    Ok(records)
}

/// Feeds every record through a fresh engine and returns the event log,
/// including deadlines that expire after the final record.
pub fn replay(trace: &[TraceRecord], scene: &Scene, config: &FusionConfig) -> Result<Vec<InteractionEvent>> {
    let mut engine = Engine::new(scene.clone(), *config)?;
    let mut events = Vec::new();
    for (i, record) in trace.iter().enumerate() {
        let emitted = engine.step(*record).map_err(|e| Error::TraceParse {
            line: i + 1,
            message: e.to_string(),
        })?;
        events.extend(emitted);
    }
    events.extend(engine.finish());
    Ok(events)
}

pub fn write_events(events: &[InteractionEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&e.to_json());
        out.push('\n');
    }
    out
}

pub fn parse_events(text: &str) -> Result<Vec<InteractionEvent>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| Error::TraceParse {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}
