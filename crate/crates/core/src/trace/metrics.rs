//! Scoring an event log against ground-truth labels.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::{DragEndReason, EventPayload, Hand, InteractionEvent, ResolutionSource};
use crate::Millis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    Resolved,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Label {
    pub trial: usize,
    pub target: String,
    pub expect: Expectation,
    pub onset_ms: Millis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub trials: usize,
    pub correct_selections: usize,
    pub failed: usize,
    pub wrong_target: usize,
    pub early_triggered: usize,
    pub late_triggered: usize,
    /// Mean of (resolution time − onset) over resolved trials.
    pub mean_resolution_latency_ms: f64,
    /// Manipulation events not backed by a pinch-bound selection.
    pub midas_events: usize,
    /// Drags cut short by tracking loss on trials expected to resolve.
    pub object_losses: usize,
    /// Trials whose outcome matches the label: intended target when a
    /// resolution was expected, failure when one was not.
    pub expectation_met: usize,
    pub accuracy: f64,
}

struct Outcome<'a> {
    event: &'a InteractionEvent,
    onset_ms: Millis,
    used: bool,
}

pub fn evaluate(events: &[InteractionEvent], labels: &[Label]) -> Result<Metrics> {
    let mut outcomes: Vec<Outcome> = events
        .iter()
        .filter_map(|e| match e.payload {
            EventPayload::SelectionResolved { onset_ms, .. } | EventPayload::SelectionFailed { onset_ms } => {
                Some(Outcome {
                    event: e,
                    onset_ms,
                    used: false,
                })
            }
            _ => None,
        })
        .collect();
    if outcomes.len() != labels.len() {
        return Err(Error::Evaluation(format!(
            "{} selection outcomes in the log but {} labeled trials",
            outcomes.len(),
            labels.len()
        )));
    }

    let mut m = Metrics {
        trials: labels.len(),
        correct_selections: 0,
        failed: 0,
        wrong_target: 0,
        early_triggered: 0,
        late_triggered: 0,
        mean_resolution_latency_ms: 0.0,
        midas_events: 0,
        object_losses: 0,
        expectation_met: 0,
        accuracy: 0.0,
    };
    // selection event address → label expectation, for loss accounting
    let mut expectation_of: BTreeMap<(Millis, Hand), Expectation> = BTreeMap::new();
    let mut latency_sum = 0u64;
    let mut resolved = 0usize;

    for label in labels {
        let outcome = outcomes
            .iter_mut()
            .find(|o| !o.used && o.onset_ms == label.onset_ms)
            .ok_or_else(|| {
                Error::Evaluation(format!(
                    "no selection outcome for trial {} (onset {} ms)",
                    label.trial, label.onset_ms
                ))
            })?;
        outcome.used = true;
        let event = outcome.event;
        if let Some(hand) = event.hand {
            expectation_of.insert((label.onset_ms, hand), label.expect);
        }
        match &event.payload {
            EventPayload::SelectionResolved { via, onset_ms, .. } => {
                resolved += 1;
                latency_sum += event.t - onset_ms;
                match via {
                    ResolutionSource::Early => m.early_triggered += 1,
                    ResolutionSource::Late => m.late_triggered += 1,
                    _ => {}
                }
                if event.target.as_deref() == Some(label.target.as_str()) {
                    m.correct_selections += 1;
                    if label.expect == Expectation::Resolved {
                        m.expectation_met += 1;
                    }
                } else {
                    m.wrong_target += 1;
                }
            }
            _ => {
                m.failed += 1;
                if label.expect == Expectation::Failed {
                    m.expectation_met += 1;
                }
            }
        }
    }

    let (midas, losses) = audit_manipulation(events, &expectation_of);
    m.midas_events = midas;
    m.object_losses = losses;
    if resolved > 0 {
        m.mean_resolution_latency_ms = latency_sum as f64 / resolved as f64;
    }
    if m.trials > 0 {
        m.accuracy = m.correct_selections as f64 / m.trials as f64;
    }
    Ok(m)
}

#[derive(Default, Clone, Copy)]
struct HandAudit {
    selected: bool,
    dragging: bool,
    onset: Option<Millis>,
}

/// Walks the log per hand, counting manipulation events that no pinch
/// selection accounts for and drags lost to tracking.
fn audit_manipulation(events: &[InteractionEvent], expectation_of: &BTreeMap<(Millis, Hand), Expectation>) -> (usize, usize) {
    let mut hands: BTreeMap<Hand, HandAudit> = BTreeMap::new();
    let mut midas = 0;
    let mut losses = 0;
    for e in events {
        let Some(hand) = e.hand else {
            if matches!(
                e.payload,
                EventPayload::TwoHandStart { .. } | EventPayload::TwoHandUpdate { .. } | EventPayload::TwoHandEnd { .. }
            ) && !Hand::BOTH.iter().all(|h| hands.get(h).is_some_and(|a| a.dragging))
            {
                midas += 1;
            }
            continue;
        };
        let state = hands.entry(hand).or_default();
        match &e.payload {
            EventPayload::SelectionResolved { onset_ms, .. } => {
                state.selected = true;
                state.onset = Some(*onset_ms);
            }
            EventPayload::DragStart { .. } => {
                if !state.selected || state.dragging {
                    midas += 1;
                }
                state.selected = false;
                state.dragging = true;
            }
            EventPayload::DragMove { .. } => {
                if !state.dragging {
                    midas += 1;
                }
            }
            EventPayload::DragEnd { reason } => {
                if !state.dragging {
                    midas += 1;
                }
                if *reason == DragEndReason::TrackingLost {
                    let expected = state
                        .onset
                        .and_then(|onset| expectation_of.get(&(onset, hand)));
                    if expected == Some(&Expectation::Resolved) {
                        losses += 1;
                    }
                }
                state.dragging = false;
                state.onset = None;
            }
            _ => {}
        }
    }
    (midas, losses)
}
