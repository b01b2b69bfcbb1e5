//! Seeded synthetic traces with ground-truth labels.
//!
//! Each trial follows the same script. The gaze rests on `rest`, saccades to
//! the intended target (linear interpolation over `saccade_duration_ms`),
//! dwells there and saccades back. The dwell lasts until the fixation has
//! registered (`fixation_min_duration_ms` after the first on-target sample,
//! the *fixation arrival*) plus `dwell_extra_ms`. The pinch onset sits at
//! arrival + `pinch_offset_ms`, so negative offsets are early triggers and
//! offsets past the dwell are late triggers. While pinched, the hand moves
//! linearly along `drag_vector`; after release it returns to its home pose.
//!
//! Every gaze sample gets isotropic Gaussian noise in the yaw/pitch chart.
//! Samples sit on fixed grids (`floor(i * 1000 / rate)` ms); pinch edges snap
//! to the next hand-grid tick. Noise is drawn from [`SimRng`] in gaze-sample
//! order, two draws (yaw then pitch) per sample, so a seed fully determines
//! the output.
//!
//! The gaze aims at authored target centers; a plan that revisits an object
//! it dragged earlier will look at the object's old position.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixation::GazeSample;
use crate::fusion::{Hand, HandSample, Input};
use crate::geometry::{Direction, HandPosition};
use crate::rng::SimRng;
use crate::scene::Scene;
use crate::trace::metrics::{Expectation, Label};
use crate::trace::TraceRecord;
use crate::Millis;

/// How long a released hand takes to drift back to its home pose.
const HAND_RETURN_MS: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dropout {
    /// Relative to the pinch onset.
    pub start_ms: Millis,
    pub len_ms: Millis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialPlan {
    pub intended_target: String,
    /// Onset relative to fixation arrival; negative means the pinch leads.
    #[serde(default)]
    pub pinch_offset_ms: i64,
    #[serde(default = "default_hold")]
    pub hold_ms: Millis,
    /// Hand motion while pinched, meters (lateral, vertical).
    #[serde(default)]
    pub drag_vector: [f64; 2],
    #[serde(default)]
    pub dropout: Option<Dropout>,
    #[serde(default = "default_hand")]
    pub hand: Hand,
    /// When false the gaze visits the target but no hand ever pinches and
    /// the trial gets no label.
    #[serde(default = "default_pinch")]
    pub pinch: bool,
}

fn default_hold() -> Millis {
    300
}

fn default_hand() -> Hand {
    Hand::Right
}

fn default_pinch() -> bool {
    true
}

impl TrialPlan {
    pub fn new(target: impl Into<String>, pinch_offset_ms: i64) -> Self {
        Self {
            intended_target: target.into(),
            pinch_offset_ms,
            hold_ms: default_hold(),
            drag_vector: [0.0, 0.0],
            dropout: None,
            hand: default_hand(),
            pinch: true,
        }
    }

    /// A dwell on `target` with no pinch.
    pub fn look(target: impl Into<String>) -> Self {
        Self {
            pinch: false,
            ..Self::new(target, 0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub seed: u64,
    /// Minimum trace length; the plan must fit inside it when set.
    pub duration_ms: Option<Millis>,
    pub gaze_noise_std_deg: f64,
    pub saccade_duration_ms: Millis,
    pub gaze_rate_hz: f64,
    pub hand_rate_hz: f64,
    /// Where the eyes idle between trials; must not hit any target.
    pub rest: Direction,
    /// Right-hand home pose; the left hand mirrors it in x.
    pub hand_home: HandPosition,
    /// Dwell needed before the detector registers a fixation.
    pub fixation_min_duration_ms: Millis,
    /// How long the gaze lingers after the fixation registers.
    pub dwell_extra_ms: Millis,
    /// Windows used only to label expected outcomes.
    pub early_window_ms: Millis,
    pub late_window_ms: Millis,
    pub lead_in_ms: Millis,
    pub inter_trial_ms: Millis,
    pub trial_plan: Vec<TrialPlan>,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            duration_ms: None,
            gaze_noise_std_deg: 0.4,
            saccade_duration_ms: 40,
            gaze_rate_hz: 120.0,
            hand_rate_hz: 60.0,
            rest: Direction::new(0.0, -30.0),
            hand_home: HandPosition::new(0.15, -0.3, 0.45),
            fixation_min_duration_ms: 200,
            dwell_extra_ms: 25,
            early_window_ms: 100,
            late_window_ms: 150,
            lead_in_ms: 500,
            inter_trial_ms: 400,
            trial_plan: Vec::new(),
        }
    }
}

impl GenConfig {
    fn validate(&self, scene: &Scene) -> Result<()> {
        if !(self.gaze_rate_hz > 0.0) || !(self.hand_rate_hz > 0.0) {
            return Err(Error::Config("sample rates must be > 0".into()));
        }
        if !(self.gaze_noise_std_deg >= 0.0) {
            return Err(Error::Config("gaze_noise_std_deg must be >= 0".into()));
        }
        if scene.hit_test(self.rest).is_some() {
            return Err(Error::Config("rest direction lies on a target".into()));
        }
        if !self.hand_home.is_plausible() {
            return Err(Error::Config("hand_home is outside the tracking volume".into()));
        }
        for trial in &self.trial_plan {
            if scene.target(&trial.intended_target).is_none() {
                return Err(Error::UnknownTarget(trial.intended_target.clone()));
            }
        }
        Ok(())
    }

    /// Whether an onset should resolve, given when the fixation registers
    /// (`arrival`) and the last gaze sample before the eyes leave
    /// (`last_on`). Times are grid-snapped, as they appear in the trace.
    pub fn expects_resolution(&self, onset: Millis, arrival: Millis, last_on: Millis) -> bool {
        onset + self.early_window_ms >= arrival && onset <= last_on + self.late_window_ms
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub trace: Vec<TraceRecord>,
    pub labels: Vec<Label>,
}

/// Sample times of a fixed-rate grid.
struct Grid {
    rate_hz: f64,
}

impl Grid {
    fn at(&self, i: u64) -> Millis {
        (i as f64 * 1000.0 / self.rate_hz).floor() as Millis
    }

    /// Last tick at or before `t`.
    fn floor(&self, t: Millis) -> Millis {
        let mut i = (t as f64 * self.rate_hz / 1000.0).floor() as u64 + 1;
        while self.at(i) > t {
            i -= 1;
        }
        self.at(i)
    }

    /// First tick at or after `t`.
    fn ceil(&self, t: Millis) -> Millis {
        let mut i = (t as f64 * self.rate_hz / 1000.0).floor() as u64;
        while self.at(i) < t {
            i += 1;
        }
        while i > 0 && self.at(i - 1) >= t {
            i -= 1;
        }
        self.at(i)
    }

    fn ticks_until(&self, end: Millis) -> impl Iterator<Item = Millis> + '_ {
        (0..).map(|i| self.at(i)).take_while(move |&t| t <= end)
    }
}

/// Piecewise-linear gaze path between keyframes.
struct GazePath {
    keys: Vec<(Millis, Direction)>,
}

impl GazePath {
    fn at(&self, t: Millis) -> Direction {
        let idx = self.keys.partition_point(|&(kt, _)| kt <= t);
        if idx == 0 {
            return self.keys[0].1;
        }
        if idx == self.keys.len() {
            return self.keys[idx - 1].1;
        }
        let (t0, a) = self.keys[idx - 1];
        let (t1, b) = self.keys[idx];
        let s = (t - t0) as f64 / (t1 - t0) as f64;
        Direction {
            yaw: a.yaw + (b.yaw - a.yaw) * s,
            pitch: a.pitch + (b.pitch - a.pitch) * s,
        }
    }
}

struct HandScript {
    hand: Hand,
    onset: Millis,
    release: Millis,
    drag: [f64; 2],
    dropout: Option<(Millis, Millis)>,
}

/// Produces a trace and its labels. Identical inputs give identical output.
pub fn generate(scene: &Scene, cfg: &GenConfig) -> Result<Generated> {
    cfg.validate(scene)?;
    let gaze_grid = Grid { rate_hz: cfg.gaze_rate_hz };
    let hand_grid = Grid { rate_hz: cfg.hand_rate_hz };

    let mut keys = vec![(0, cfg.rest)];
    let mut scripts: Vec<HandScript> = Vec::new();
    let mut labels = Vec::new();
    let mut cursor = cfg.lead_in_ms;
    let mut last_release: Option<Millis> = None;

    for (k, trial) in cfg.trial_plan.iter().enumerate() {
        let target = scene.target(&trial.intended_target).expect("validated");
        let center = target.center;
        let landing = cursor + cfg.saccade_duration_ms;
        let first_on = gaze_grid.ceil(landing);
        let arrival = gaze_grid.ceil(first_on + cfg.fixation_min_duration_ms);
        let departure = arrival + cfg.dwell_extra_ms;
        let back = departure + cfg.saccade_duration_ms;
        keys.extend([(cursor, cfg.rest), (landing, center), (departure, center), (back, cfg.rest)]);
        if !trial.pinch {
            cursor = back + cfg.inter_trial_ms;
            continue;
        }

        let intended = arrival as i64 + trial.pinch_offset_ms;
        if intended < 0 {
            return Err(Error::Config(format!("trial {k}: pinch onset before the start of the trace")));
        }
        let onset = hand_grid.ceil(intended as Millis);
        if last_release.is_some_and(|r| onset <= r) {
            return Err(Error::Config(format!(
                "trial {k}: pinch onset overlaps the previous trial; raise inter_trial_ms"
            )));
        }
        let release = hand_grid.ceil(onset + trial.hold_ms.max(1));
        scripts.push(HandScript {
            hand: trial.hand,
            onset,
            release,
            drag: trial.drag_vector,
            dropout: trial
                .dropout
                .map(|d| (onset + d.start_ms, onset + d.start_ms + d.len_ms)),
        });
        labels.push(Label {
            trial: k,
            target: trial.intended_target.clone(),
            expect: if cfg.expects_resolution(onset, arrival, gaze_grid.floor(departure)) {
                Expectation::Resolved
            } else {
                Expectation::Failed
            },
            onset_ms: onset,
        });
        last_release = Some(release);
        cursor = back.max(release) + cfg.inter_trial_ms;
    }

    let end = match cfg.duration_ms {
        Some(d) if d < cursor => {
            return Err(Error::Config(format!(
                "trial plan needs {cursor} ms but duration_ms is {d}"
            )))
        }
        Some(d) => d,
        None => cursor,
    };

    let path = GazePath { keys };
    let mut rng = SimRng::new(cfg.seed);
    let sigma = cfg.gaze_noise_std_deg;
    let gaze: Vec<TraceRecord> = gaze_grid
        .ticks_until(end)
        .map(|t| {
            let p = path.at(t);
            let (ny, np) = (rng.gaussian() * sigma, rng.gaussian() * sigma);
            Input::Gaze(GazeSample::new(t, p.yaw + ny, p.pitch + np))
        })
        .collect();

    let mut hands = Vec::new();
    for t in hand_grid.ticks_until(end) {
        for hand in Hand::BOTH {
            hands.push(Input::Hand(hand_sample(cfg, &scripts, hand, t)));
        }
    }

    Ok(Generated {
        trace: merge_streams(gaze, hands),
        labels,
    })
}

fn home_of(cfg: &GenConfig, hand: Hand) -> HandPosition {
    let h = cfg.hand_home;
    match hand {
        Hand::Right => h,
        Hand::Left => HandPosition::new(-h.x, h.y, h.z),
    }
}

fn hand_sample(cfg: &GenConfig, scripts: &[HandScript], hand: Hand, t: Millis) -> HandSample {
    let home = home_of(cfg, hand);
    let offset_by = |d: [f64; 2], s: f64| HandPosition::new(home.x + d[0] * s, home.y + d[1] * s, home.z);

    let mut pos = home;
    let mut pinching = false;
    let mut tracked = true;
    // latest script for this hand that has begun
    if let Some(script) = scripts.iter().rev().find(|s| s.hand == hand && s.onset <= t) {
        if t < script.release {
            let s = (t - script.onset) as f64 / (script.release - script.onset) as f64;
            pos = offset_by(script.drag, s);
            pinching = true;
        } else {
            let back = ((t - script.release) as f64 / HAND_RETURN_MS).min(1.0);
            pos = offset_by(script.drag, 1.0 - back);
        }
        if let Some((from, to)) = script.dropout {
            if (from..to).contains(&t) {
                tracked = false;
                pinching = false;
            }
        }
    }
    HandSample {
        t,
        hand,
        pos,
        pinching,
        tracked,
    }
}

/// Time-ordered merge; at equal timestamps gaze precedes hands.
fn merge_streams(gaze: Vec<TraceRecord>, hands: Vec<TraceRecord>) -> Vec<TraceRecord> {
    let mut out = Vec::with_capacity(gaze.len() + hands.len());
    let mut g = gaze.into_iter().peekable();
    let mut h = hands.into_iter().peekable();
    loop {
        match (g.peek(), h.peek()) {
            (Some(a), Some(b)) => {
                if a.t() <= b.t() {
                    out.extend(g.next());
                } else {
                    out.extend(h.next());
                }
            }
            (Some(_), None) => out.extend(g.next()),
            (None, Some(_)) => out.extend(h.next()),
            (None, None) => return out,
        }
    }
}
