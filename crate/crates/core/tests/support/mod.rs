#![allow(dead_code)]

pub mod idt_oracle;

use gazepinch::rng::SimRng;
use gazepinch::{FixationConfig, GazeSample, Millis};

/// Gaze that alternates between noisy dwells, saccades and blinks, sampled
/// at irregular intervals. Yaw stays well inside ±180 so no wrap occurs.
pub fn random_gaze(seed: u64, len: usize) -> Vec<GazeSample> {
    let mut rng = SimRng::new(seed);
    let mut out = Vec::with_capacity(len);
    let mut t: Millis = rng.range_u64(0, 50);
    let (mut yaw, mut pitch) = (rng.range(-30.0, 30.0), rng.range(-20.0, 20.0));
    let mut sigma = 0.2;
    let mut blink_left = 0;
    while out.len() < len {
        let roll = rng.uniform();
        if roll < 0.04 {
            // saccade to a new spot
            yaw = rng.range(-30.0, 30.0);
            pitch = rng.range(-20.0, 20.0);
            sigma = rng.range(0.0, 0.6);
        } else if roll < 0.05 {
            blink_left = rng.range_u64(1, 12);
        }
        let step = if rng.chance(0.02) { rng.range_u64(40, 150) } else { rng.range_u64(1, 20) };
        t += step;
        if blink_left > 0 {
            blink_left -= 1;
            out.push(GazeSample::invalid(t));
        } else {
            out.push(GazeSample::new(t, yaw + rng.gaussian() * sigma, pitch + rng.gaussian() * sigma));
        }
    }
    out
}

/// A detector config drawn from a small grid so thresholds vary per seed.
pub fn random_fixation_config(seed: u64) -> FixationConfig {
    let mut rng = SimRng::new(seed ^ 0xf1f1_f1f1);
    FixationConfig {
        min_duration_ms: [100, 150, 200, 250][rng.range_u64(0, 3) as usize],
        dispersion_threshold_deg: [0.5, 1.0, 1.5, 2.0][rng.range_u64(0, 3) as usize],
        max_gap_ms: [30, 50, 75, 100][rng.range_u64(0, 3) as usize],
    }
}

// ── hand-built traces ──────────────────────────────────────────

use gazepinch::{Engine, Hand, HandPosition, HandSample, Input, InteractionEvent};

/// Gaze samples every `step` ms on [from, to], all at one point.
pub fn dwell(from: Millis, to: Millis, step: Millis, yaw: f64, pitch: f64) -> Vec<Input> {
    (from..=to)
        .step_by(step as usize)
        .map(|t| Input::Gaze(GazeSample::new(t, yaw, pitch)))
        .collect()
}

pub fn right_home() -> HandPosition {
    HandPosition::new(0.15, -0.3, 0.45)
}

pub fn left_home() -> HandPosition {
    HandPosition::new(-0.15, -0.3, 0.45)
}

pub fn hand(t: Millis, which: Hand, pos: HandPosition, pinching: bool) -> Input {
    Input::Hand(HandSample::new(t, which, pos, pinching))
}

pub fn lost(t: Millis, which: Hand, pos: HandPosition) -> Input {
    Input::Hand(HandSample::untracked(t, which, pos))
}

/// Stable time order with gaze before hands and left before right at ties.
pub fn ordered(mut inputs: Vec<Input>) -> Vec<Input> {
    inputs.sort_by_key(|i| {
        let rank = match i {
            Input::Gaze(_) => 0,
            Input::Hand(h) if h.hand == Hand::Left => 1,
            Input::Hand(_) => 2,
        };
        (i.t(), rank)
    });
    inputs
}

pub fn run(engine: &mut Engine, inputs: &[Input]) -> Vec<InteractionEvent> {
    let mut out = Vec::new();
    for i in inputs {
        out.extend(engine.step(*i).unwrap());
    }
    out
}

/// Events other than fixation boundaries.
pub fn interaction(events: &[InteractionEvent]) -> Vec<&InteractionEvent> {
    events.iter().filter(|e| e.kind() != "FixationDebug").collect()
}

pub fn kinds(events: &[&InteractionEvent]) -> Vec<&'static str> {
    events.iter().map(|e| e.kind()).collect()
}

// ── random sessions ────────────────────────────────────────────

use gazepinch::trace::{Dropout, GenConfig, TrialPlan};
use gazepinch::{Scene, Target, TargetKind};

/// Three to six well-separated targets above the rest direction, with one
/// canvas among them on odd seeds.
pub fn random_scene(seed: u64) -> Scene {
    let mut rng = SimRng::new(seed ^ 0x5ce4e);
    let n = rng.range_u64(3, 6) as usize;
    let mut targets = Vec::new();
    for k in 0..n {
        let yaw = -40.0 + 16.0 * k as f64 + rng.range(-2.0, 2.0);
        let pitch = rng.range(-5.0, 10.0);
        let radius = rng.range(1.5, 3.0);
        let depth = rng.range(0.8, 6.0);
        let kind = if seed % 2 == 1 && k == n - 1 { TargetKind::Canvas } else { TargetKind::Object };
        targets.push(Target::new(format!("t{k}"), yaw, pitch, radius, depth, kind));
    }
    Scene::new(targets).unwrap()
}

/// Trials with offsets anywhere from well before to well after the dwell,
/// random hands, drags and occasional dropouts.
pub fn random_plan(seed: u64, scene: &Scene, trials: usize) -> Vec<TrialPlan> {
    let mut rng = SimRng::new(seed ^ 0x91a4);
    (0..trials)
        .map(|_| {
            let target = &scene.targets[rng.range_u64(0, scene.targets.len() as u64 - 1) as usize];
            let mut plan = TrialPlan::new(target.id.clone(), rng.range_u64(0, 700) as i64 - 300);
            plan.hold_ms = rng.range_u64(50, 600);
            plan.drag_vector = [rng.range(-0.1, 0.1), rng.range(-0.1, 0.1)];
            plan.hand = if rng.chance(0.5) { Hand::Left } else { Hand::Right };
            if rng.chance(0.3) {
                plan.dropout = Some(Dropout {
                    start_ms: rng.range_u64(0, plan.hold_ms),
                    len_ms: rng.range_u64(10, 400),
                });
            }
            if rng.chance(0.1) {
                plan.pinch = false;
            }
            plan
        })
        .collect()
}

pub fn gen_config(seed: u64, noise: f64, plan: Vec<TrialPlan>) -> GenConfig {
    GenConfig {
        seed,
        gaze_noise_std_deg: noise,
        trial_plan: plan,
        ..GenConfig::default()
    }
}
