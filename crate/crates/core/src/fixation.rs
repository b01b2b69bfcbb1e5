//! Online dispersion-threshold (I-DT) fixation detection.
//!
//! Valid samples are appended to a window while the window's dispersion
//! (yaw span + pitch span) stays within the threshold. Once the window
//! covers `min_duration_ms` it becomes a fixation and keeps growing until a
//! sample would push it over the threshold; that sample seeds the next
//! window. A candidate window that breaks before reaching the minimum
//! duration sheds samples from its front until the breaking sample fits.
//!
//! Consecutive valid samples further apart than `max_gap_ms` (typically a
//! blink or tracker dropout) split the window.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Direction, SpanBounds};
use crate::Millis;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeSample {
    pub t: Millis,
    pub dir: Direction,
    /// Tracker confidence gate; invalid samples never join a window.
    pub valid: bool,
}

impl GazeSample {
    pub fn new(t: Millis, yaw: f64, pitch: f64) -> Self {
        Self {
            t,
            dir: Direction::new(yaw, pitch),
            valid: true,
        }
    }

    pub fn invalid(t: Millis) -> Self {
        Self {
            t,
            dir: Direction::ZERO,
            valid: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixationConfig {
    pub min_duration_ms: Millis,
    pub dispersion_threshold_deg: f64,
    /// Longest run without a valid sample that a window survives.
    pub max_gap_ms: Millis,
}

impl Default for FixationConfig {
    fn default() -> Self {
        Self {
            min_duration_ms: 200,
            dispersion_threshold_deg: 1.0,
            max_gap_ms: 75,
        }
    }
}

impl FixationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_duration_ms == 0 {
            return Err(Error::Config("fixation.min_duration_ms must be > 0".into()));
        }
        if !(self.dispersion_threshold_deg > 0.0) || !self.dispersion_threshold_deg.is_finite() {
            return Err(Error::Config(
                "fixation.dispersion_threshold_deg must be > 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fixation {
    pub id: u64,
    /// Mean of the member samples.
    pub center: Direction,
    pub start_ms: Millis,
    /// Timestamp of the last member sample.
    pub end_ms: Millis,
    pub dispersion_deg: f64,
    pub ongoing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixationEvent {
    Started(Fixation),
    Extended(Fixation),
    Ended(Fixation),
}

impl FixationEvent {
    pub fn fixation(&self) -> &Fixation {
        match self {
            FixationEvent::Started(f) | FixationEvent::Extended(f) | FixationEvent::Ended(f) => f,
        }
    }
}

#[derive(Debug, Clone)]
struct Active {
    fixation: Fixation,
    sum_yaw: f64,
    sum_pitch: f64,
    count: usize,
}

impl Active {
    fn refresh_center(&mut self) {
        let n = self.count as f64;
        self.fixation.center = Direction {
            yaw: self.sum_yaw / n,
            pitch: self.sum_pitch / n,
        };
    }
}

#[derive(Debug, Clone)]
pub struct FixationDetector {
    config: FixationConfig,
    window: VecDeque<(Millis, Direction)>,
    bounds: Option<SpanBounds>,
    active: Option<Active>,
    history: Vec<Fixation>,
    last_t: Option<Millis>,
    next_id: u64,
}

impl FixationDetector {
    pub fn new(config: FixationConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            window: VecDeque::new(),
            bounds: None,
            active: None,
            history: Vec::new(),
            last_t: None,
            next_id: 0,
        })
    }

    pub fn config(&self) -> &FixationConfig {
        &self.config
    }

    /// Swaps the configuration. Any open window is closed first so every
    /// recorded fixation satisfies the thresholds it was detected under.
    pub fn reconfigure(&mut self, config: FixationConfig) -> Result<Vec<FixationEvent>> {
        config.validate()?;
        let mut events = Vec::new();
        self.break_window(&mut events);
        self.config = config;
        Ok(events)
    }

    pub fn last_t(&self) -> Option<Millis> {
        self.last_t
    }

    pub fn push_gaze(&mut self, sample: GazeSample) -> Result<Vec<FixationEvent>> {
        if let Some(previous) = self.last_t {
            if sample.t < previous {
                return Err(Error::NonMonotonic {
                    previous,
                    got: sample.t,
                });
            }
        }
        self.last_t = Some(sample.t);

        let mut events = Vec::new();
        if let Some(&(last_member, _)) = self.window.back() {
            if sample.t - last_member > self.config.max_gap_ms {
                self.break_window(&mut events);
            }
        }
        if sample.valid {
            self.admit(sample.t, sample.dir, &mut events);
        }
        Ok(events)
    }

    fn admit(&mut self, t: Millis, dir: Direction, events: &mut Vec<FixationEvent>) {
        let threshold = self.config.dispersion_threshold_deg;
        let Some(bounds) = self.bounds else {
            self.window.push_back((t, dir));
            self.bounds = Some(SpanBounds::new(dir));
            self.maybe_start(events);
            return;
        };

        let grown = bounds.with(dir);
        if grown.dispersion() <= threshold {
            self.window.push_back((t, dir));
            self.bounds = Some(grown);
            if let Some(active) = self.active.as_mut() {
                active.sum_yaw += dir.yaw;
                active.sum_pitch += dir.pitch;
                active.count += 1;
                active.fixation.end_ms = t;
                active.fixation.dispersion_deg = grown.dispersion();
                active.refresh_center();
                events.push(FixationEvent::Extended(active.fixation));
            } else {
                self.maybe_start(events);
            }
            return;
        }

        if self.active.is_some() {
            self.break_window(events);
            self.window.push_back((t, dir));
            self.bounds = Some(SpanBounds::new(dir));
        } else {
            // shed the oldest samples until the newcomer fits
            loop {
                self.window.pop_front();
                let fits = self
                    .window
                    .iter()
                    .fold(SpanBounds::new(dir), |b, &(_, p)| b.with(p));
                if fits.dispersion() <= threshold {
                    self.window.push_back((t, dir));
                    self.bounds = Some(fits);
                    break;
                }
            }
        }
        self.maybe_start(events);
    }

    fn maybe_start(&mut self, events: &mut Vec<FixationEvent>) {
        if self.active.is_some() {
            return;
        }
        let (Some(&(start, _)), Some(&(end, _))) = (self.window.front(), self.window.back()) else {
            return;
        };
        if end - start < self.config.min_duration_ms {
            return;
        }
        let (mut sum_yaw, mut sum_pitch) = (0.0, 0.0);
        for (_, p) in &self.window {
            sum_yaw += p.yaw;
            sum_pitch += p.pitch;
        }
        let mut active = Active {
            fixation: Fixation {
                id: self.next_id,
                center: Direction::ZERO,
                start_ms: start,
                end_ms: end,
                dispersion_deg: self.bounds.map(|b| b.dispersion()).unwrap_or(0.0),
                ongoing: true,
            },
            sum_yaw,
            sum_pitch,
            count: self.window.len(),
        };
        active.refresh_center();
        self.next_id += 1;
        events.push(FixationEvent::Started(active.fixation));
        self.active = Some(active);
    }

    fn break_window(&mut self, events: &mut Vec<FixationEvent>) {
        self.window.clear();
        self.bounds = None;
        if let Some(active) = self.active.take() {
            let mut done = active.fixation;
            done.ongoing = false;
            self.history.push(done);
            events.push(FixationEvent::Ended(done));
        }
    }

    /// The fixation in progress, if the current window has qualified.
    pub fn current(&self) -> Option<&Fixation> {
        self.active.as_ref().map(|a| &a.fixation)
    }

    /// Completed fixations, oldest first.
    pub fn history(&self) -> &[Fixation] {
        &self.history
    }

    /// Every fixation detected so far, including the one in progress.
    pub fn fixations(&self) -> Vec<Fixation> {
        let mut all = self.history.clone();
        all.extend(self.current().copied());
        all
    }

    /// The fixation ongoing at `t`, or else the latest one that ended no
    /// more than `lookback_ms` before `t`.
    pub fn fixation_near(&self, t: Millis, lookback_ms: Millis) -> Option<Fixation> {
        if let Some(current) = self.current() {
            if current.start_ms <= t {
                return Some(*current);
            }
        }
        let idx = self.history.partition_point(|f| f.start_ms <= t);
        let latest = self.history[..idx].last()?;
        (latest.end_ms.saturating_add(lookback_ms) >= t).then_some(*latest)
    }
}
