mod support;

use approx::assert_abs_diff_eq;
use gazepinch::fusion::{DragEndReason, ResolutionSource};
use gazepinch::{
    Direction, Engine, Error, EventPayload, FusionConfig, Hand, HandPosition, Input, InteractionMode, Phase,
    Resolution, Scene, Target, TargetKind,
};
use support::*;

fn scene() -> Scene {
    Scene::new(vec![
        Target::new("a", 0.0, 0.0, 2.0, 2.0, TargetKind::Object),
        Target::new("b", 15.0, 0.0, 2.0, 2.0, TargetKind::Object),
        Target::new("knob", 0.0, -40.0, 2.0, 0.4, TargetKind::Object),
    ])
    .unwrap()
}

fn engine() -> Engine {
    Engine::new(scene(), FusionConfig::default()).unwrap()
}

fn right_idle(from: u64, to: u64) -> Vec<Input> {
    (from..=to).step_by(10).map(|t| hand(t, Hand::Right, right_home(), false)).collect()
}

/// Fixate "a" from 0 and pinch the right hand at 300, holding until `release`.
fn fixate_and_pinch(release: u64) -> Vec<Input> {
    let mut inputs = dwell(0, release + 100, 10, 0.0, 0.0);
    inputs.extend(right_idle(0, 290));
    inputs.extend((300..release).step_by(10).map(|t| {
        let dx = (t - 300) as f64 * 1e-4;
        hand(t, Hand::Right, HandPosition::new(0.15 + dx, -0.3, 0.45), true)
    }));
    ordered(inputs)
}

#[test]
fn pinch_on_fixated_target_selects_it() {
    let mut e = engine();
    let events = run(&mut e, &ordered([dwell(0, 300, 10, 0.0, 0.0), right_idle(0, 290), vec![hand(300, Hand::Right, right_home(), true)]].concat()));
    let ev = interaction(&events);
    assert_eq!(kinds(&ev), ["SelectionResolved", "DragStart"]);
    for e in &ev {
        assert_eq!(e.t, 300);
        assert_eq!(e.target.as_deref(), Some("a"));
        assert_eq!(e.hand, Some(Hand::Right));
    }
    assert!(matches!(
        ev[0].payload,
        EventPayload::SelectionResolved { onset_ms: 300, via: ResolutionSource::Ongoing, .. }
    ));
    assert_eq!(e.binding(Hand::Right).phase, Phase::Bound);
}

#[test]
fn gaze_only_never_selects() {
    let mut e = engine();
    let mut inputs = Vec::new();
    // ten seconds hopping between targets and empty space
    let spots = [(0.0, 0.0), (15.0, 0.0), (0.0, -40.0), (30.0, 10.0)];
    for k in 0..20u64 {
        let (y, p) = spots[(k % 4) as usize];
        inputs.extend(dwell(k * 500, k * 500 + 490, 10, y, p));
    }
    inputs.extend(right_idle(0, 9990));
    let events = run(&mut e, &ordered(inputs));
    events.iter().for_each(|e| assert_eq!(e.kind(), "FixationDebug"));
    assert!(events.len() >= 20);
    assert!(e.finish().is_empty());
}

#[test]
fn late_trigger_uses_fixation_that_just_ended() {
    let mut e = engine();
    let mut inputs = dwell(0, 400, 10, 0.0, 0.0);
    inputs.extend(dwell(410, 600, 10, 0.0, -30.0));
    inputs.extend(right_idle(0, 490));
    inputs.push(hand(500, Hand::Right, right_home(), true));
    let events = run(&mut e, &ordered(inputs));
    let ev = interaction(&events);
    assert_eq!(kinds(&ev), ["SelectionResolved", "DragStart"]);
    assert_eq!(ev[0].t, 500);
    assert_eq!(ev[0].target.as_deref(), Some("a"));
    assert!(matches!(
        ev[0].payload,
        EventPayload::SelectionResolved {
            via: ResolutionSource::Late,
            fixation_end_ms: Some(400),
            ..
        }
    ));
}

#[test]
fn late_trigger_beyond_window_fails() {
    let mut e = engine();
    let mut inputs = dwell(0, 400, 10, 0.0, 0.0);
    // jitter in empty space never forms a fixation
    inputs.extend((410..=800).step_by(10).map(|t| {
        let y = if (t / 10) % 2 == 0 { -2.0 } else { 2.0 };
        Input::Gaze(gazepinch::GazeSample::new(t, y, -30.0))
    }));
    inputs.extend(right_idle(0, 550));
    inputs.push(hand(560, Hand::Right, right_home(), true));
    let mut events = run(&mut e, &ordered(inputs));
    events.extend(e.finish());
    let ev = interaction(&events);
    assert_eq!(kinds(&ev), ["SelectionFailed"]);
    assert_eq!(ev[0].t, 660);
    assert!(matches!(ev[0].payload, EventPayload::SelectionFailed { onset_ms: 560 }));
}

#[test]
fn early_trigger_resolves_when_fixation_starts() {
    let mut e = engine();
    let mut inputs: Vec<Input> = (0..=350)
        .step_by(10)
        .map(|t| {
            let y = if (t / 10) % 2 == 0 { -2.0 } else { 2.0 };
            Input::Gaze(gazepinch::GazeSample::new(t, y, -30.0))
        })
        .collect();
    inputs.extend(dwell(360, 700, 10, 15.0, 0.0));
    inputs.extend(right_idle(0, 490));
    inputs.extend((500..=700).step_by(10).map(|t| hand(t, Hand::Right, right_home(), true)));
    let events = run(&mut e, &ordered(inputs));
    let ev = interaction(&events);
    assert_eq!(kinds(&ev[..2]), ["SelectionResolved", "DragStart"]);
    assert_eq!(ev[0].t, 560);
    assert_eq!(ev[0].target.as_deref(), Some("b"));
    assert!(matches!(
        ev[0].payload,
        EventPayload::SelectionResolved { onset_ms: 500, via: ResolutionSource::Early, .. }
    ));
    assert!(ev[2..].iter().all(|e| e.kind() == "DragMove"));
}

#[test]
fn pending_selection_fails_when_window_expires() {
    let mut e = engine();
    let mut inputs = dwell(0, 300, 10, 30.0, 10.0);
    inputs.extend(right_idle(0, 290));
    inputs.push(hand(300, Hand::Right, right_home(), true));
    run(&mut e, &ordered(inputs));
    assert_eq!(e.resolve_selection(300), Resolution::Deferred);
    assert_eq!(e.binding(Hand::Right).phase, Phase::PinchPending);
    // nothing fires at the deadline itself, only once time moves past it
    assert!(interaction(&e.step(hand(400, Hand::Right, right_home(), true)).unwrap()).is_empty());
    let events = e.step(hand(410, Hand::Right, right_home(), true)).unwrap();
    assert_eq!(events.len(), 1);
    assert_eq!(events[0].t, 400);
    assert!(matches!(events[0].payload, EventPayload::SelectionFailed { onset_ms: 300 }));
    // the held pinch does not retry
    assert!(run(&mut e, &dwell(420, 800, 10, 0.0, 0.0)).iter().all(|e| e.kind() == "FixationDebug"));
}

#[test]
fn brief_dropout_keeps_the_drag() {
    let mut e = engine();
    let mut inputs = fixate_and_pinch(1400);
    inputs.retain(|i| !matches!(i, Input::Hand(h) if (1000..1150).contains(&h.t)));
    inputs.extend((1000..1150).step_by(10).map(|t| lost(t, Hand::Right, right_home())));
    inputs.push(hand(1400, Hand::Right, right_home(), false));
    let inputs = ordered(inputs);
    let mut events = run(&mut e, &inputs);
    events.extend(e.finish());
    let ev = interaction(&events);
    let ends: Vec<_> = ev.iter().filter(|e| e.kind() == "DragEnd").collect();
    assert_eq!(ends.len(), 1);
    assert_eq!(ends[0].t, 1400);
    assert!(matches!(ends[0].payload, EventPayload::DragEnd { reason: DragEndReason::Release }));
    assert!(ev.iter().any(|e| e.kind() == "DragMove" && e.t == 1150));
}

#[test]
fn dropout_without_recovery_ends_at_grace_expiry() {
    let mut e = engine();
    let mut inputs = fixate_and_pinch(1000);
    inputs.extend((1000..=1500).step_by(10).map(|t| lost(t, Hand::Right, right_home())));
    let inputs = ordered(inputs);
    let mut events = Vec::new();
    let mut offset_before_loss = None;
    for i in &inputs {
        if i.t() == 1000 && offset_before_loss.is_none() {
            offset_before_loss = Some(e.scene().target("a").unwrap().position_offset);
        }
        events.extend(e.step(*i).unwrap());
    }
    let ev = interaction(&events);
    let last = ev.last().unwrap();
    assert_eq!(last.kind(), "DragEnd");
    assert_eq!(last.t, 1200);
    assert!(matches!(last.payload, EventPayload::DragEnd { reason: DragEndReason::TrackingLost }));
    let offset = e.scene().target("a").unwrap().position_offset;
    assert_eq!(Some(offset), offset_before_loss);
    assert!(offset[0] > 0.0);
}

#[test]
fn finish_flushes_grace_deadline() {
    let mut e = engine();
    let mut inputs = fixate_and_pinch(1000);
    inputs.push(lost(1000, Hand::Right, right_home()));
    run(&mut e, &ordered(inputs));
    let tail = e.finish();
    assert_eq!(tail.len(), 1);
    assert_eq!(tail[0].t, 1200);
}

fn two_hand_scene() -> Scene {
    Scene::new(vec![
        Target::new("a", 0.0, 0.0, 2.0, 2.0, TargetKind::Object),
        Target::new("wall", 0.0, 0.0, 25.0, 3.0, TargetKind::Canvas),
    ])
    .unwrap()
}

fn two_hand_start(target_yaw: f64, scene: Scene) -> (Engine, Vec<gazepinch::InteractionEvent>) {
    let mut e = Engine::new(scene, FusionConfig::default()).unwrap();
    let mut inputs = dwell(0, 320, 10, target_yaw, 0.0);
    inputs.push(hand(0, Hand::Left, HandPosition::new(-0.1, -0.3, 0.45), false));
    inputs.push(hand(0, Hand::Right, HandPosition::new(0.1, -0.3, 0.45), false));
    inputs.push(hand(300, Hand::Left, HandPosition::new(-0.1, -0.3, 0.45), true));
    inputs.push(hand(310, Hand::Right, HandPosition::new(0.1, -0.3, 0.45), true));
    let events = run(&mut e, &ordered(inputs));
    (e, events)
}

#[test]
fn spreading_hands_doubles_scale() {
    // "wall" is a canvas under "a"; nearest center wins, both at yaw 0,
    // so the tie breaks to "a"
    let (mut e, events) = two_hand_start(0.0, two_hand_scene());
    let ev = interaction(&events);
    assert_eq!(
        kinds(&ev),
        ["SelectionResolved", "DragStart", "SelectionResolved", "DragStart", "TwoHandStart"]
    );
    assert_eq!(ev[4].target.as_deref(), Some("a"));
    assert!(matches!(ev[4].payload, EventPayload::TwoHandStart { distance_m, .. } if (distance_m - 0.2).abs() < 1e-12));

    let left = gazepinch::HandSample::new(320, Hand::Left, HandPosition::new(-0.2, -0.3, 0.45), true);
    let right = gazepinch::HandSample::new(320, Hand::Right, HandPosition::new(0.2, -0.3, 0.45), true);
    let preview = e.two_hand_update(&left, &right).unwrap();
    assert_abs_diff_eq!(preview.scale, 2.0, epsilon = 1e-12);
    assert_eq!(preview.pan, [0.0, 0.0]);

    e.step(left).unwrap();
    let events = e.step(right).unwrap();
    match &events[..] {
        [u] => match u.payload {
            EventPayload::TwoHandUpdate { scale, pan, pivot, .. } => {
                assert_abs_diff_eq!(scale, 2.0, epsilon = 1e-12);
                assert_eq!(pan, [0.0, 0.0]);
                assert_eq!(pivot, Direction::new(0.0, 0.0));
            }
            ref other => panic!("{other:?}"),
        },
        other => panic!("{other:?}"),
    }
    assert_abs_diff_eq!(e.snapshot().object_scales["a"], 2.0, epsilon = 1e-12);

    // releasing one hand ends the gesture, the other keeps dragging
    let events = e.step(gazepinch::HandSample::new(330, Hand::Left, HandPosition::new(-0.2, -0.3, 0.45), false)).unwrap();
    assert_eq!(events.iter().map(|e| e.kind()).collect::<Vec<_>>(), ["TwoHandEnd", "DragEnd"]);
    let events = e.step(gazepinch::HandSample::new(330, Hand::Right, HandPosition::new(0.21, -0.3, 0.45), true)).unwrap();
    assert_eq!(events.iter().map(|e| e.kind()).collect::<Vec<_>>(), ["DragMove"]);
}

#[test]
fn two_hand_update_outside_gesture_is_an_error() {
    let e = engine();
    let l = gazepinch::HandSample::new(0, Hand::Left, left_home(), true);
    let r = gazepinch::HandSample::new(0, Hand::Right, right_home(), true);
    assert_eq!(e.two_hand_update(&l, &r), Err(Error::NotInTwoHand));
}

#[test]
fn canvas_pivot_follows_new_fixation() {
    let scene = Scene::new(vec![Target::new("wall", 0.0, 0.0, 25.0, 3.0, TargetKind::Canvas)]).unwrap();
    let (mut e, events) = two_hand_start(0.0, scene);
    assert!(events.iter().any(|e| e.kind() == "TwoHandStart"));
    let l = HandPosition::new(-0.1, -0.3, 0.45);
    let r = HandPosition::new(0.1, -0.3, 0.45);

    // gaze leaves; hands stay put
    let mut inputs: Vec<Input> = Vec::new();
    // saccade in transit, then dwell at (10, 0)
    inputs.extend(dwell(330, 330, 10, 5.0, 0.0));
    inputs.extend(dwell(340, 600, 10, 10.0, 0.0));
    for t in (330..=600).step_by(10) {
        inputs.push(hand(t, Hand::Left, l, true));
        inputs.push(hand(t, Hand::Right, r, true));
    }
    let mut pivots = Vec::new();
    let mut fixation_started_at = None;
    for i in ordered(inputs) {
        for ev in e.step(i).unwrap() {
            match ev.payload {
                EventPayload::TwoHandUpdate { scale, pivot, .. } => {
                    assert_abs_diff_eq!(scale, 1.0, epsilon = 1e-12);
                    pivots.push((ev.t, pivot));
                }
                EventPayload::FixationDebug { boundary: gazepinch::fusion::FixationBoundary::Started, .. } => {
                    fixation_started_at = Some(ev.t)
                }
                _ => {}
            }
        }
    }
    let started = fixation_started_at.expect("second fixation registers");
    assert_eq!(started, 540);
    for (t, pivot) in &pivots {
        if *t < started {
            // no ongoing fixation: pivot stays where the last one left it
            assert_eq!(*pivot, Direction::new(0.0, 0.0), "t={t}");
        } else {
            assert_eq!(*pivot, Direction::new(10.0, 0.0), "t={t}");
        }
    }
    assert_eq!(e.view("wall").copied(), Some(gazepinch::ViewTransform::default()));
}

#[test]
fn canvas_zoom_moves_view_about_pivot() {
    let scene = Scene::new(vec![Target::new("wall", 0.0, 0.0, 25.0, 3.0, TargetKind::Canvas)]).unwrap();
    let (mut e, _) = two_hand_start(4.0, scene);
    e.step(hand(330, Hand::Left, HandPosition::new(-0.2, -0.3, 0.45), true)).unwrap();
    e.step(hand(330, Hand::Right, HandPosition::new(0.2, -0.3, 0.45), true)).unwrap();
    let view = *e.view("wall").unwrap();
    assert_abs_diff_eq!(view.scale, 2.0, epsilon = 1e-12);
    // content under the pivot stays under it
    let pivot = [4.0, 0.0];
    let before = gazepinch::ViewTransform::default().to_content(pivot);
    let after = view.to_screen(before);
    assert_abs_diff_eq!(after[0], pivot[0], epsilon = 1e-9);
    assert_abs_diff_eq!(after[1], pivot[1], epsilon = 1e-9);
}

#[test]
fn two_objects_two_hands_drag_independently() {
    let mut e = engine();
    let mut inputs = dwell(0, 300, 10, 0.0, 0.0);
    inputs.extend(dwell(310, 700, 10, 15.0, 0.0));
    inputs.push(hand(300, Hand::Left, left_home(), true));
    inputs.push(hand(600, Hand::Right, right_home(), true));
    inputs.push(hand(610, Hand::Left, HandPosition::new(-0.16, -0.3, 0.45), true));
    inputs.push(hand(610, Hand::Right, HandPosition::new(0.16, -0.3, 0.45), true));
    let events = run(&mut e, &ordered(inputs));
    let ev = interaction(&events);
    assert!(ev.iter().all(|e| !e.kind().starts_with("TwoHand")));
    assert_eq!(e.binding(Hand::Left).target.as_deref(), Some("a"));
    assert_eq!(e.binding(Hand::Right).target.as_deref(), Some("b"));
}

#[test]
fn mode_follows_hand_proximity() {
    let mut e = engine();
    let knob = e.scene().target("knob").unwrap().position();
    let mut inputs = dwell(0, 1000, 10, 0.0, 0.0);
    inputs.push(hand(100, Hand::Right, knob, true));
    inputs.push(hand(110, Hand::Right, HandPosition::new(knob.x + 0.01, knob.y, knob.z), true));
    inputs.push(hand(120, Hand::Right, HandPosition::new(knob.x + 0.01, knob.y, knob.z), false));
    inputs.push(hand(500, Hand::Right, right_home(), true));
    let events = run(&mut e, &ordered(inputs));
    let ev = interaction(&events);
    assert_eq!(
        kinds(&ev),
        [
            "ModeChanged",
            "SelectionResolved",
            "DragStart",
            "DragMove",
            "DragEnd",
            "ModeChanged",
            "SelectionResolved",
            "DragStart"
        ]
    );
    assert!(matches!(
        ev[0].payload,
        EventPayload::ModeChanged { mode: InteractionMode::Direct, previous: InteractionMode::Indirect }
    ));
    // gaze was on "a" the whole time; direct mode ignores it
    assert_eq!(ev[1].target.as_deref(), Some("knob"));
    assert!(matches!(ev[1].payload, EventPayload::SelectionResolved { via: ResolutionSource::Direct, .. }));
    // direct drags use a 1:1 transfer
    match ev[3].payload {
        EventPayload::DragMove { delta } => assert_abs_diff_eq!(delta[0], (0.01f64 / 0.4).atan().to_degrees(), epsilon = 1e-12),
        ref other => panic!("{other:?}"),
    }
    assert!(matches!(
        ev[5].payload,
        EventPayload::ModeChanged { mode: InteractionMode::Indirect, previous: InteractionMode::Direct }
    ));
    assert_eq!(ev[6].target.as_deref(), Some("a"));
}

#[test]
fn config_locked_during_drag() {
    let mut e = engine();
    let prefix: Vec<_> = fixate_and_pinch(500).into_iter().filter(|i| i.t() <= 350).collect();
    run(&mut e, &prefix);
    assert_eq!(e.binding(Hand::Right).phase, Phase::Bound);
    let mut cfg = *e.config();
    cfg.late_window_ms = 50;
    assert_eq!(e.set_config(cfg), Err(Error::ConfigLocked));
    e.step(hand(e.snapshot().t.unwrap(), Hand::Right, right_home(), false)).unwrap();
    assert!(e.set_config(cfg).is_ok());
    assert_eq!(e.config().late_window_ms, 50);
}

#[test]
fn quick_pinch_released_before_resolution() {
    let mut e = engine();
    let mut inputs: Vec<Input> = (0..=350)
        .step_by(10)
        .map(|t| {
            let y = if (t / 10) % 2 == 0 { -2.0 } else { 2.0 };
            Input::Gaze(gazepinch::GazeSample::new(t, y, -30.0))
        })
        .collect();
    inputs.extend(dwell(360, 700, 10, 15.0, 0.0));
    inputs.push(hand(500, Hand::Right, right_home(), true));
    inputs.push(hand(520, Hand::Right, right_home(), false));
    let events = run(&mut e, &ordered(inputs));
    let ev = interaction(&events);
    assert_eq!(kinds(&ev), ["SelectionResolved", "DragStart", "DragEnd"]);
    assert!(ev.iter().all(|e| e.t == 560));
    assert_eq!(e.binding(Hand::Right).phase, Phase::Idle);
}

#[test]
fn second_onset_while_pending_fails_the_first() {
    let mut e = engine();
    let mut inputs = dwell(0, 300, 10, 30.0, 10.0);
    inputs.push(hand(300, Hand::Right, right_home(), true));
    inputs.push(hand(320, Hand::Right, right_home(), false));
    inputs.push(hand(340, Hand::Right, right_home(), true));
    let events = run(&mut e, &ordered(inputs));
    let ev = interaction(&events);
    assert_eq!(kinds(&ev), ["SelectionFailed"]);
    assert!(matches!(ev[0].payload, EventPayload::SelectionFailed { onset_ms: 300 }));
    assert_eq!(ev[0].t, 340);
    assert_eq!(e.binding(Hand::Right).pinch_onset_ms, 340);
}

#[test]
fn non_monotonic_input_leaves_state_unchanged() {
    let mut e = engine();
    let prefix: Vec<_> = fixate_and_pinch(500).into_iter().filter(|i| i.t() <= 350).collect();
    run(&mut e, &prefix);
    let before = e.snapshot();
    assert!(matches!(
        e.step(hand(0, Hand::Right, right_home(), false)),
        Err(Error::NonMonotonic { .. })
    ));
    assert_eq!(e.snapshot(), before);
}

#[test]
fn pinch_while_untracked_is_rejected() {
    let mut e = engine();
    let bad = gazepinch::HandSample {
        t: 0,
        hand: Hand::Left,
        pos: left_home(),
        pinching: true,
        tracked: false,
    };
    assert_eq!(e.step(bad), Err(Error::PinchWithoutTracking(0)));
}
