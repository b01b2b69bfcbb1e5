//! The gaze + pinch binding state machine.
//!
//! Gaze is consulted at exactly one moment per gesture: the pinch onset.
//! From then on the hand alone drives the bound target, and gaze samples can
//! only move the zoom pivot of a two-handed canvas gesture. Each hand keeps
//! its own [`BindingRecord`], so the two hands may work on different targets,
//! share one target (two-hand transform), or run in different modes.
//!
//! Timing tolerance comes in two windows. A fixation that ended at most
//! `late_window_ms` before the onset still counts (the eyes left a little
//! early). If nothing qualifies at onset, the hand waits up to
//! `early_window_ms` for a fixation to start (the pinch came a little early).
//!
//! Time only advances with input. Deadlines (early-window expiry, tracking
//! grace expiry) fire when the first input past them arrives, stamped with
//! the deadline itself, or on [`Engine::finish`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixation::{Fixation, FixationConfig, FixationDetector, FixationEvent, GazeSample};
use crate::geometry::{Direction, HandPosition};
use crate::scene::{Scene, TargetId};
use crate::transfer::{drag_delta, zoom_transform, TransferConfig, ViewTransform};
use crate::Millis;

/// Two-hand distances below this are treated as this, keeping scale finite.
const MIN_TWO_HAND_DISTANCE_M: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hand {
    Left,
    Right,
}

impl Hand {
    pub const BOTH: [Hand; 2] = [Hand::Left, Hand::Right];

    fn index(self) -> usize {
        match self {
            Hand::Left => 0,
            Hand::Right => 1,
        }
    }

    pub fn other(self) -> Hand {
        match self {
            Hand::Left => Hand::Right,
            Hand::Right => Hand::Left,
        }
    }
}

impl fmt::Display for Hand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hand::Left => "left",
            Hand::Right => "right",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandSample {
    pub t: Millis,
    pub hand: Hand,
    pub pos: HandPosition,
    /// Thumb–index contact.
    pub pinching: bool,
    pub tracked: bool,
}

impl HandSample {
    pub fn new(t: Millis, hand: Hand, pos: HandPosition, pinching: bool) -> Self {
        Self {
            t,
            hand,
            pos,
            pinching,
            tracked: true,
        }
    }

    pub fn untracked(t: Millis, hand: Hand, pos: HandPosition) -> Self {
        Self {
            t,
            hand,
            pos,
            pinching: false,
            tracked: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Input {
    Gaze(GazeSample),
    Hand(HandSample),
}

impl Input {
    pub fn t(&self) -> Millis {
        match self {
            Input::Gaze(g) => g.t,
            Input::Hand(h) => h.t,
        }
    }
}

impl From<GazeSample> for Input {
    fn from(g: GazeSample) -> Self {
        Input::Gaze(g)
    }
}

impl From<HandSample> for Input {
    fn from(h: HandSample) -> Self {
        Input::Hand(h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionConfig {
    pub late_window_ms: Millis,
    pub early_window_ms: Millis,
    pub grace_period_ms: Millis,
    pub fixation: FixationConfig,
    pub transfer: TransferConfig,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            late_window_ms: 150,
            early_window_ms: 100,
            grace_period_ms: 200,
            fixation: FixationConfig::default(),
            transfer: TransferConfig::default(),
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        self.fixation.validate()?;
        self.transfer.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Idle,
    /// Pinched with no usable fixation yet; waiting out the early window.
    PinchPending,
    Bound,
    /// Bound, but the hand dropped out of tracking; grace clock running.
    Lost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionMode {
    Indirect,
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BindingRecord {
    pub phase: Phase,
    pub target: Option<TargetId>,
    pub mode: InteractionMode,
    pub pinch_onset_ms: Millis,
    pub last_hand_pos: Option<HandPosition>,
    pub loss_since_ms: Option<Millis>,
}

impl Default for BindingRecord {
    fn default() -> Self {
        Self {
            phase: Phase::Idle,
            target: None,
            mode: InteractionMode::Indirect,
            pinch_onset_ms: 0,
            last_hand_pos: None,
            loss_since_ms: None,
        }
    }
}

/// Which gaze evidence a selection was resolved from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolutionSource {
    /// A fixation in progress at the onset.
    Ongoing,
    /// A fixation that ended within the late window before the onset.
    Late,
    /// A fixation that started within the early window after the onset.
    Early,
    /// Hand within reach of the target; gaze not consulted.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DragEndReason {
    Release,
    TrackingLost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixationBoundary {
    Started,
    Ended,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum EventPayload {
    SelectionResolved {
        onset_ms: Millis,
        via: ResolutionSource,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fixation_start_ms: Option<Millis>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fixation_end_ms: Option<Millis>,
    },
    SelectionFailed {
        onset_ms: Millis,
    },
    DragStart {
        mode: InteractionMode,
    },
    DragMove {
        delta: [f64; 2],
    },
    DragEnd {
        reason: DragEndReason,
    },
    TwoHandStart {
        hands: [Hand; 2],
        distance_m: f64,
        pivot: Direction,
    },
    TwoHandUpdate {
        hands: [Hand; 2],
        scale: f64,
        pivot: Direction,
        pan: [f64; 2],
    },
    TwoHandEnd {
        hands: [Hand; 2],
    },
    ModeChanged {
        mode: InteractionMode,
        previous: InteractionMode,
    },
    FixationDebug {
        boundary: FixationBoundary,
        fixation: Fixation,
    },
}

impl EventPayload {
    pub fn kind(&self) -> &'static str {
        match self {
            EventPayload::SelectionResolved { .. } => "SelectionResolved",
            EventPayload::SelectionFailed { .. } => "SelectionFailed",
            EventPayload::DragStart { .. } => "DragStart",
            EventPayload::DragMove { .. } => "DragMove",
            EventPayload::DragEnd { .. } => "DragEnd",
            EventPayload::TwoHandStart { .. } => "TwoHandStart",
            EventPayload::TwoHandUpdate { .. } => "TwoHandUpdate",
            EventPayload::TwoHandEnd { .. } => "TwoHandEnd",
            EventPayload::ModeChanged { .. } => "ModeChanged",
            EventPayload::FixationDebug { .. } => "FixationDebug",
        }
    }

    /// Selection, drag and two-hand events: everything a pinch can cause.
    pub fn is_manipulation(&self) -> bool {
        !matches!(
            self,
            EventPayload::FixationDebug { .. } | EventPayload::ModeChanged { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub t: Millis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hand: Option<Hand>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetId>,
    #[serde(flatten)]
    pub payload: EventPayload,
}

impl InteractionEvent {
    pub fn kind(&self) -> &'static str {
        self.payload.kind()
    }

    /// One JSON object, no trailing newline.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("events serialize")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Resolution {
    Immediate {
        target: TargetId,
        fixation: Fixation,
    },
    Deferred,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoHandUpdate {
    pub scale: f64,
    pub pivot: Direction,
    pub pan: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
struct TwoHandState {
    target: TargetId,
    canvas: bool,
    start_distance: f64,
    start_mid: HandPosition,
    pivot: Direction,
    last_scale: f64,
    last_pan: [f64; 2],
    /// Canvas view when the current pivot took effect, with the gesture's
    /// cumulative scale and pan at that moment. The view is always derived
    /// from this base so it does not depend on which hand moved first.
    base_view: ViewTransform,
    base_scale: f64,
    base_pan: [f64; 2],
}

#[derive(Debug, Clone, Default)]
struct HandState {
    record: BindingRecord,
    /// Pinch flag of the latest tracked sample; onsets are edges of this.
    last_tracked_pinch: bool,
    /// Pinch already released while the selection was still pending.
    released_while_pending: bool,
}

/// Per-hand state for live display.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandSnapshot {
    pub phase: Phase,
    pub target: Option<TargetId>,
    pub mode: InteractionMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineSnapshot {
    pub t: Option<Millis>,
    pub hands: BTreeMap<Hand, HandSnapshot>,
    pub fixation: Option<Direction>,
    pub two_hand: Option<TargetId>,
    pub views: BTreeMap<TargetId, ViewTransform>,
    pub offsets: BTreeMap<TargetId, [f64; 2]>,
    pub object_scales: BTreeMap<TargetId, f64>,
}

#[derive(Debug, Clone)]
pub struct Engine {
    config: FusionConfig,
    scene: Scene,
    detector: FixationDetector,
    hands: [HandState; 2],
    two_hand: Option<TwoHandState>,
    views: BTreeMap<TargetId, ViewTransform>,
    object_scales: BTreeMap<TargetId, f64>,
    last_t: Option<Millis>,
}

impl Engine {
    pub fn new(scene: Scene, config: FusionConfig) -> Result<Self> {
        config.validate()?;
        scene.validate()?;
        let views = scene
            .targets
            .iter()
            .filter(|t| t.is_canvas())
            .map(|t| (t.id.clone(), ViewTransform::default()))
            .collect();
        Ok(Self {
            detector: FixationDetector::new(config.fixation)?,
            config,
            scene,
            hands: Default::default(),
            two_hand: None,
            views,
            object_scales: BTreeMap::new(),
            last_t: None,
        })
    }

    pub fn config(&self) -> &FusionConfig {
        &self.config
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn detector(&self) -> &FixationDetector {
        &self.detector
    }

    pub fn binding(&self, hand: Hand) -> &BindingRecord {
        &self.hands[hand.index()].record
    }

    pub fn view(&self, canvas: &str) -> Option<&ViewTransform> {
        self.views.get(canvas)
    }

    pub fn in_two_hand(&self) -> bool {
        self.two_hand.is_some()
    }

    /// True while either hand is pinched on or waiting for a target.
    pub fn gesture_active(&self) -> bool {
        self.hands.iter().any(|h| h.record.phase != Phase::Idle)
    }

    /// Replaces the configuration. Refused while any gesture is in flight.
    pub fn set_config(&mut self, config: FusionConfig) -> Result<Vec<InteractionEvent>> {
        if self.gesture_active() {
            return Err(Error::ConfigLocked);
        }
        config.validate()?;
        let t = self.last_t.unwrap_or(0);
        let boundaries = if config.fixation != self.config.fixation {
            self.detector.reconfigure(config.fixation)?
        } else {
            Vec::new()
        };
        self.config = config;
        Ok(boundaries
            .into_iter()
            .filter_map(|e| fixation_debug(t, &e))
            .collect())
    }

    pub fn step(&mut self, input: impl Into<Input>) -> Result<Vec<InteractionEvent>> {
        let input = input.into();
        let t = input.t();
        if let Some(previous) = self.last_t {
            if t < previous {
                return Err(Error::NonMonotonic { previous, got: t });
            }
        }
        validate_input(&input)?;

        let mut out = Vec::new();
        self.fire_deadlines(Some(t), &mut out);
        self.last_t = Some(t);
        match input {
            Input::Gaze(g) => self.on_gaze(g, &mut out),
            Input::Hand(h) => self.on_hand(h, &mut out),
        }
        Ok(out)
    }

    /// Expires every armed window as if input had ended.
    pub fn finish(&mut self) -> Vec<InteractionEvent> {
        let mut out = Vec::new();
        self.fire_deadlines(None, &mut out);
        if let Some(last) = out.last() {
            self.last_t = Some(self.last_t.map_or(last.t, |t| t.max(last.t)));
        }
        out
    }

    /// Where the selection for an indirect pinch at `onset_ms` comes from.
    pub fn resolve_selection(&self, onset_ms: Millis) -> Resolution {
        if let Some(fixation) = self.detector.fixation_near(onset_ms, self.config.late_window_ms) {
            if let Some(target) = self.scene.hit_test(fixation.center) {
                return Resolution::Immediate {
                    target: target.id.clone(),
                    fixation,
                };
            }
        }
        if self.config.early_window_ms > 0 {
            Resolution::Deferred
        } else {
            Resolution::Failed
        }
    }

    /// Transform implied by the current two-hand gesture for the given hand
    /// positions. Does not mutate the engine.
    pub fn two_hand_update(&self, left: &HandSample, right: &HandSample) -> Result<TwoHandUpdate> {
        let th = self.two_hand.as_ref().ok_or(Error::NotInTwoHand)?;
        self.compute_two_hand(th, &left.pos, &right.pos)
    }

    pub fn snapshot(&self) -> EngineSnapshot {
        EngineSnapshot {
            t: self.last_t,
            hands: Hand::BOTH
                .iter()
                .map(|&h| {
                    let r = &self.hands[h.index()].record;
                    (
                        h,
                        HandSnapshot {
                            phase: r.phase,
                            target: r.target.clone(),
                            mode: r.mode,
                        },
                    )
                })
                .collect(),
            fixation: self.detector.current().map(|f| f.center),
            two_hand: self.two_hand.as_ref().map(|th| th.target.clone()),
            views: self.views.clone(),
            offsets: self
                .scene
                .targets
                .iter()
                .filter(|t| t.position_offset != [0.0, 0.0])
                .map(|t| (t.id.clone(), t.position_offset))
                .collect(),
            object_scales: self.object_scales.clone(),
        }
    }

    // ── deadlines ──────────────────────────────────────────────

    fn next_deadline(&self) -> Option<(Millis, Hand)> {
        Hand::BOTH
            .iter()
            .filter_map(|&h| {
                let r = &self.hands[h.index()].record;
                match r.phase {
                    Phase::PinchPending => Some((r.pinch_onset_ms + self.config.early_window_ms, h)),
                    Phase::Lost => r.loss_since_ms.map(|since| (since + self.config.grace_period_ms, h)),
                    _ => None,
                }
            })
            .min()
    }

    /// Fires deadlines strictly before `now` (all of them when `now` is None).
    fn fire_deadlines(&mut self, now: Option<Millis>, out: &mut Vec<InteractionEvent>) {
        while let Some((deadline, hand)) = self.next_deadline() {
            if now.is_some_and(|now| deadline >= now) {
                break;
            }
            match self.hands[hand.index()].record.phase {
                Phase::PinchPending => {
                    let onset = self.hands[hand.index()].record.pinch_onset_ms;
                    self.fail_selection(hand, deadline, onset, out);
                }
                Phase::Lost => self.end_drag(hand, deadline, DragEndReason::TrackingLost, out),
                _ => unreachable!("deadline only for pending or lost hands"),
            }
        }
    }

    // ── gaze ───────────────────────────────────────────────────

    fn on_gaze(&mut self, sample: GazeSample, out: &mut Vec<InteractionEvent>) {
        let boundaries = self
            .detector
            .push_gaze(sample)
            .expect("engine enforces monotonic input");
        for event in boundaries {
            match event {
                FixationEvent::Started(f) => {
                    out.extend(fixation_debug(sample.t, &event));
                    self.refresh_pivot(f.center);
                    self.resolve_pending(sample.t, f, out);
                }
                FixationEvent::Ended(f) => {
                    out.extend(fixation_debug(sample.t, &event));
                    self.refresh_pivot(f.center);
                }
                FixationEvent::Extended(_) => {}
            }
        }
    }

    fn refresh_pivot(&mut self, center: Direction) {
        if let Some(th) = self.two_hand.as_mut() {
            if th.canvas {
                th.base_view = self.views.get(&th.target).copied().unwrap_or_default();
                th.base_scale = th.last_scale;
                th.base_pan = th.last_pan;
                th.pivot = center;
            }
        }
    }

    fn resolve_pending(&mut self, t: Millis, fixation: Fixation, out: &mut Vec<InteractionEvent>) {
        for hand in Hand::BOTH {
            if self.hands[hand.index()].record.phase != Phase::PinchPending {
                continue;
            }
            // a miss keeps the hand waiting for the rest of the window
            if let Some(target) = self.scene.hit_test(fixation.center) {
                let target = target.id.clone();
                self.bind(hand, t, target, ResolutionSource::Early, Some(fixation), out);
            }
        }
    }

    // ── hands ──────────────────────────────────────────────────

    fn on_hand(&mut self, sample: HandSample, out: &mut Vec<InteractionEvent>) {
        let hand = sample.hand;
        let t = sample.t;
        let idx = hand.index();

        if !sample.tracked {
            let rec = &mut self.hands[idx].record;
            if rec.phase == Phase::Bound {
                rec.phase = Phase::Lost;
                rec.loss_since_ms = Some(t);
            }
            return;
        }

        let was_pinching = self.hands[idx].last_tracked_pinch;
        self.hands[idx].last_tracked_pinch = sample.pinching;
        let onset = sample.pinching && !was_pinching;

        match self.hands[idx].record.phase {
            Phase::Lost | Phase::Bound => {
                if self.hands[idx].record.phase == Phase::Lost {
                    let rec = &mut self.hands[idx].record;
                    rec.phase = Phase::Bound;
                    rec.loss_since_ms = None;
                }
                if sample.pinching {
                    self.drag(hand, t, sample.pos, out);
                } else {
                    self.hands[idx].record.last_hand_pos = Some(sample.pos);
                    self.end_drag(hand, t, DragEndReason::Release, out);
                }
            }
            Phase::PinchPending => {
                if onset {
                    let previous_onset = self.hands[idx].record.pinch_onset_ms;
                    self.fail_selection(hand, t, previous_onset, out);
                    self.onset(hand, t, sample.pos, out);
                } else {
                    if !sample.pinching {
                        self.hands[idx].released_while_pending = true;
                    }
                    self.hands[idx].record.last_hand_pos = Some(sample.pos);
                }
            }
            Phase::Idle => {
                if onset {
                    self.onset(hand, t, sample.pos, out);
                } else {
                    self.hands[idx].record.last_hand_pos = Some(sample.pos);
                }
            }
        }
    }

    fn onset(&mut self, hand: Hand, t: Millis, pos: HandPosition, out: &mut Vec<InteractionEvent>) {
        let direct = if pos.norm() <= self.scene.near_threshold_m {
            self.scene.hand_proximal_target(&pos).map(|tg| tg.id.clone())
        } else {
            None
        };
        let mode = if direct.is_some() {
            InteractionMode::Direct
        } else {
            InteractionMode::Indirect
        };

        let state = &mut self.hands[hand.index()];
        state.released_while_pending = false;
        let rec = &mut state.record;
        if rec.mode != mode {
            out.push(InteractionEvent {
                t,
                hand: Some(hand),
                target: None,
                payload: EventPayload::ModeChanged {
                    mode,
                    previous: rec.mode,
                },
            });
            rec.mode = mode;
        }
        rec.pinch_onset_ms = t;
        rec.last_hand_pos = Some(pos);

        if let Some(target) = direct {
            self.bind(hand, t, target, ResolutionSource::Direct, None, out);
            return;
        }
        match self.resolve_selection(t) {
            Resolution::Immediate { target, fixation } => {
                let via = if fixation.ongoing {
                    ResolutionSource::Ongoing
                } else {
                    ResolutionSource::Late
                };
                self.bind(hand, t, target, via, Some(fixation), out);
            }
            Resolution::Deferred => {
                self.hands[hand.index()].record.phase = Phase::PinchPending;
            }
            Resolution::Failed => self.fail_selection(hand, t, t, out),
        }
    }

    fn fail_selection(&mut self, hand: Hand, t: Millis, onset_ms: Millis, out: &mut Vec<InteractionEvent>) {
        let state = &mut self.hands[hand.index()];
        state.record.phase = Phase::Idle;
        state.record.target = None;
        state.released_while_pending = false;
        out.push(InteractionEvent {
            t,
            hand: Some(hand),
            target: None,
            payload: EventPayload::SelectionFailed { onset_ms },
        });
    }

    fn bind(
        &mut self,
        hand: Hand,
        t: Millis,
        target: TargetId,
        via: ResolutionSource,
        fixation: Option<Fixation>,
        out: &mut Vec<InteractionEvent>,
    ) {
        let state = &mut self.hands[hand.index()];
        let released = std::mem::take(&mut state.released_while_pending);
        let rec = &mut state.record;
        rec.phase = Phase::Bound;
        rec.target = Some(target.clone());
        rec.loss_since_ms = None;
        let mode = rec.mode;
        out.push(InteractionEvent {
            t,
            hand: Some(hand),
            target: Some(target.clone()),
            payload: EventPayload::SelectionResolved {
                onset_ms: rec.pinch_onset_ms,
                via,
                fixation_start_ms: fixation.map(|f| f.start_ms),
                fixation_end_ms: fixation.map(|f| f.end_ms),
            },
        });
        out.push(InteractionEvent {
            t,
            hand: Some(hand),
            target: Some(target.clone()),
            payload: EventPayload::DragStart { mode },
        });

        if released {
            // a quick pinch that resolved late: select, then let go at once
            self.end_drag(hand, t, DragEndReason::Release, out);
            return;
        }

        let other = &self.hands[hand.other().index()].record;
        if matches!(other.phase, Phase::Bound | Phase::Lost) && other.target.as_ref() == Some(&target) {
            self.start_two_hand(t, target, out);
        }
    }

    fn end_drag(&mut self, hand: Hand, t: Millis, reason: DragEndReason, out: &mut Vec<InteractionEvent>) {
        if self.two_hand.take().is_some() {
            out.push(InteractionEvent {
                t,
                hand: None,
                target: self.hands[hand.index()].record.target.clone(),
                payload: EventPayload::TwoHandEnd { hands: Hand::BOTH },
            });
        }
        let rec = &mut self.hands[hand.index()].record;
        let target = rec.target.take();
        rec.phase = Phase::Idle;
        rec.loss_since_ms = None;
        out.push(InteractionEvent {
            t,
            hand: Some(hand),
            target,
            payload: EventPayload::DragEnd { reason },
        });
    }

    fn drag(&mut self, hand: Hand, t: Millis, pos: HandPosition, out: &mut Vec<InteractionEvent>) {
        let idx = hand.index();
        if self.two_hand.is_some() {
            self.hands[idx].record.last_hand_pos = Some(pos);
            let other = &self.hands[hand.other().index()].record;
            if other.phase == Phase::Bound {
                self.emit_two_hand_update(t, out);
            }
            return;
        }

        let rec = &self.hands[idx].record;
        let target_id = rec.target.clone().expect("bound hand has a target");
        let from = rec.last_hand_pos.unwrap_or(pos);
        let transfer = match rec.mode {
            InteractionMode::Direct => TransferConfig::unity(),
            InteractionMode::Indirect => self.config.transfer,
        };
        let target = self.scene.target(&target_id).expect("bound target exists");
        let delta = drag_delta(pos.lateral_delta_from(&from), target.depth_m, &transfer)
            .expect("scene depths are validated");
        self.hands[idx].record.last_hand_pos = Some(pos);
        self.displace(&target_id, delta);
        out.push(InteractionEvent {
            t,
            hand: Some(hand),
            target: Some(target_id),
            payload: EventPayload::DragMove { delta },
        });
    }

    /// Moves an object, or pans a canvas view.
    fn displace(&mut self, target_id: &str, delta: [f64; 2]) {
        if let Some(view) = self.views.get_mut(target_id) {
            view.offset[0] += delta[0];
            view.offset[1] += delta[1];
        } else if let Some(target) = self.scene.target_mut(target_id) {
            target.position_offset[0] += delta[0];
            target.position_offset[1] += delta[1];
        }
    }

    // ── two hands ──────────────────────────────────────────────

    fn hand_positions(&self) -> (HandPosition, HandPosition) {
        let pos = |h: Hand| {
            self.hands[h.index()]
                .record
                .last_hand_pos
                .unwrap_or(HandPosition::new(0.0, 0.0, 0.0))
        };
        (pos(Hand::Left), pos(Hand::Right))
    }

    fn start_two_hand(&mut self, t: Millis, target_id: TargetId, out: &mut Vec<InteractionEvent>) {
        let target = self.scene.target(&target_id).expect("bound target exists");
        let canvas = target.is_canvas();
        let pivot = if canvas {
            self.detector
                .current()
                .or(self.detector.history().last())
                .map(|f| f.center)
                .unwrap_or(target.effective_center())
        } else {
            target.effective_center()
        };
        let (left, right) = self.hand_positions();
        let distance = left.distance_to(&right);
        self.two_hand = Some(TwoHandState {
            target: target_id.clone(),
            canvas,
            start_distance: distance.max(MIN_TWO_HAND_DISTANCE_M),
            start_mid: left.midpoint(&right),
            pivot,
            last_scale: 1.0,
            last_pan: [0.0, 0.0],
            base_view: self.views.get(&target_id).copied().unwrap_or_default(),
            base_scale: 1.0,
            base_pan: [0.0, 0.0],
        });
        out.push(InteractionEvent {
            t,
            hand: None,
            target: Some(target_id),
            payload: EventPayload::TwoHandStart {
                hands: Hand::BOTH,
                distance_m: distance,
                pivot,
            },
        });
    }

    fn compute_two_hand(&self, th: &TwoHandState, left: &HandPosition, right: &HandPosition) -> Result<TwoHandUpdate> {
        let target = self
            .scene
            .target(&th.target)
            .ok_or_else(|| Error::UnknownTarget(th.target.clone()))?;
        let both_direct = Hand::BOTH
            .iter()
            .all(|h| self.hands[h.index()].record.mode == InteractionMode::Direct);
        let transfer = if both_direct {
            TransferConfig::unity()
        } else {
            self.config.transfer
        };
        let scale = left.distance_to(right).max(MIN_TWO_HAND_DISTANCE_M) / th.start_distance;
        let mid = left.midpoint(right);
        let pan = drag_delta(mid.lateral_delta_from(&th.start_mid), target.depth_m, &transfer)?;
        let pivot = if th.canvas {
            th.pivot
        } else {
            target.effective_center()
        };
        Ok(TwoHandUpdate { scale, pivot, pan })
    }

    fn emit_two_hand_update(&mut self, t: Millis, out: &mut Vec<InteractionEvent>) {
        let Some(th) = self.two_hand.clone() else {
            return;
        };
        let (left, right) = self.hand_positions();
        let update = self
            .compute_two_hand(&th, &left, &right)
            .expect("two-hand target exists");

        if let Some(view) = self.views.get_mut(&th.target) {
            let ratio = update.scale / th.base_scale;
            let pan = [update.pan[0] - th.base_pan[0], update.pan[1] - th.base_pan[1]];
            *view = zoom_transform(ratio, update.pivot, pan, th.base_view).expect("scale ratio is positive");
        } else {
            let ratio = update.scale / th.last_scale;
            let pan_step = [update.pan[0] - th.last_pan[0], update.pan[1] - th.last_pan[1]];
            *self.object_scales.entry(th.target.clone()).or_insert(1.0) *= ratio;
            self.displace(&th.target, pan_step);
        }
        if let Some(state) = self.two_hand.as_mut() {
            state.last_scale = update.scale;
            state.last_pan = update.pan;
        }
        // objects scale about their own (possibly just panned) center
        let pivot = if th.canvas {
            update.pivot
        } else {
            self.scene
                .target(&th.target)
                .map(|t| t.effective_center())
                .unwrap_or(update.pivot)
        };
        out.push(InteractionEvent {
            t,
            hand: None,
            target: Some(th.target),
            payload: EventPayload::TwoHandUpdate {
                hands: Hand::BOTH,
                scale: update.scale,
                pivot,
                pan: update.pan,
            },
        });
    }
}

fn fixation_debug(t: Millis, event: &FixationEvent) -> Option<InteractionEvent> {
    let (boundary, fixation) = match event {
        FixationEvent::Started(f) => (FixationBoundary::Started, *f),
        FixationEvent::Ended(f) => (FixationBoundary::Ended, *f),
        FixationEvent::Extended(_) => return None,
    };
    Some(InteractionEvent {
        t,
        hand: None,
        target: None,
        payload: EventPayload::FixationDebug { boundary, fixation },
    })
}

fn validate_input(input: &Input) -> Result<()> {
    match input {
        Input::Gaze(g) => {
            if g.valid && !(g.dir.yaw.is_finite() && g.dir.pitch.is_finite()) {
                return Err(Error::InvalidSample(format!("gaze at t={} is not finite", g.t)));
            }
        }
        Input::Hand(h) => {
            if h.pinching && !h.tracked {
                return Err(Error::PinchWithoutTracking(h.t));
            }
            if h.tracked && !h.pos.is_plausible() {
                return Err(Error::InvalidSample(format!(
                    "{} hand at t={} is outside the tracking volume",
                    h.hand, h.t
                )));
            }
        }
    }
    Ok(())
}
