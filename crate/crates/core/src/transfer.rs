//! Control-display transfer functions.
//!
//! Hand motion is mapped to angular object motion. Close to the body the
//! mapping is 1:1 in meters; far away the configured far-field mapping takes
//! over, with a blend in between so a dragged object never jumps when its
//! depth crosses the band.
//!
//! The far-field `VisualAngle` mapping keeps the object's angular motion
//! equal to the angle the hand sweeps at `hand_reference_distance_m`.
//! `DistanceGain` amplifies hand motion by `depth / reference` and converts
//! the result back to an angle at the object's depth; the two reduce to the
//! same expression and are kept as separate routes that are tested against
//! each other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{hand_delta_to_visual_angle, Direction, MIN_HAND_DISTANCE_M};

/// Targets at or below this depth are invalid drag targets.
pub const MIN_TARGET_DEPTH_M: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferMode {
    VisualAngle,
    DistanceGain,
    Unity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Blend {
    Hard,
    Smoothstep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransferConfig {
    pub mode: TransferMode,
    pub hand_reference_distance_m: f64,
    pub near_depth_m: f64,
    pub far_depth_m: f64,
    pub blend: Blend,
}

impl Default for TransferConfig {
    fn default() -> Self {
        Self {
            mode: TransferMode::VisualAngle,
            hand_reference_distance_m: 0.6,
            near_depth_m: 1.0,
            far_depth_m: 2.0,
            blend: Blend::Smoothstep,
        }
    }
}

impl TransferConfig {
    pub fn unity() -> Self {
        Self {
            mode: TransferMode::Unity,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.near_depth_m > 0.0) {
            return Err(Error::Config("transfer.near_depth_m must be > 0".into()));
        }
        if !(self.far_depth_m > self.near_depth_m) {
            return Err(Error::Config(
                "transfer.far_depth_m must exceed transfer.near_depth_m".into(),
            ));
        }
        if !(self.hand_reference_distance_m > MIN_HAND_DISTANCE_M) {
            return Err(Error::Config(
                "transfer.hand_reference_distance_m must be > 0.05".into(),
            ));
        }
        Ok(())
    }
}

fn unity_angle(hand_delta: [f64; 2], depth: f64) -> [f64; 2] {
    [
        (hand_delta[0] / depth).atan().to_degrees(),
        (hand_delta[1] / depth).atan().to_degrees(),
    ]
}

fn distance_gain_angle(hand_delta: [f64; 2], depth: f64, reference: f64) -> [f64; 2] {
    let gain = depth / reference;
    [
        (gain * hand_delta[0] / depth).atan().to_degrees(),
        (gain * hand_delta[1] / depth).atan().to_degrees(),
    ]
}

fn far_field(hand_delta: [f64; 2], depth: f64, config: &TransferConfig) -> Result<[f64; 2]> {
    match config.mode {
        TransferMode::VisualAngle => {
            hand_delta_to_visual_angle(hand_delta, config.hand_reference_distance_m)
        }
        TransferMode::DistanceGain => Ok(distance_gain_angle(
            hand_delta,
            depth,
            config.hand_reference_distance_m,
        )),
        TransferMode::Unity => Ok(unity_angle(hand_delta, depth)),
    }
}

/// Blend weight of the far-field mapping for a target at `depth`.
pub fn far_weight(depth: f64, config: &TransferConfig) -> f64 {
    if depth <= config.near_depth_m {
        return 0.0;
    }
    if depth >= config.far_depth_m {
        return 1.0;
    }
    let s = (depth - config.near_depth_m) / (config.far_depth_m - config.near_depth_m);
    match config.blend {
        Blend::Hard => {
            if s < 0.5 {
                0.0
            } else {
                1.0
            }
        }
        Blend::Smoothstep => s * s * (3.0 - 2.0 * s),
    }
}

/// Angular object motion (degrees) produced by a hand motion (meters).
pub fn drag_delta(hand_delta: [f64; 2], target_depth_m: f64, config: &TransferConfig) -> Result<[f64; 2]> {
    if !(target_depth_m > MIN_TARGET_DEPTH_M) || !target_depth_m.is_finite() {
        return Err(Error::InvalidDepth(target_depth_m));
    }
    let near = unity_angle(hand_delta, target_depth_m);
    let w = far_weight(target_depth_m, config);
    if w == 0.0 {
        return Ok(near);
    }
    let far = far_field(hand_delta, target_depth_m, config)?;
    if w == 1.0 {
        return Ok(far);
    }
    Ok([
        (1.0 - w) * near[0] + w * far[0],
        (1.0 - w) * near[1] + w * far[1],
    ])
}

/// Linear displacement at `depth` that subtends `delta_deg`.
pub fn angular_to_linear(delta_deg: [f64; 2], depth: f64) -> [f64; 2] {
    [
        depth * delta_deg[0].to_radians().tan(),
        depth * delta_deg[1].to_radians().tan(),
    ]
}

/// Pan/zoom state of a canvas, in chart degrees.
///
/// Content point `c` is displayed at `c * scale + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewTransform {
    pub offset: [f64; 2],
    pub scale: f64,
}

impl Default for ViewTransform {
    fn default() -> Self {
        Self {
            offset: [0.0, 0.0],
            scale: 1.0,
        }
    }
}

impl ViewTransform {
    pub fn to_screen(&self, content: [f64; 2]) -> [f64; 2] {
        [
            content[0] * self.scale + self.offset[0],
            content[1] * self.scale + self.offset[1],
        ]
    }

    pub fn to_content(&self, screen: [f64; 2]) -> [f64; 2] {
        [
            (screen[0] - self.offset[0]) / self.scale,
            (screen[1] - self.offset[1]) / self.scale,
        ]
    }
}

/// Zooms `view` by `scale_ratio` about `pivot`, then pans by `pan`.
///
/// The content shown at the pivot stays at the pivot (before the pan).
pub fn zoom_transform(scale_ratio: f64, pivot: Direction, pan: [f64; 2], view: ViewTransform) -> Result<ViewTransform> {
    if !(scale_ratio > 0.0) || !scale_ratio.is_finite() {
        return Err(Error::InvalidScale(scale_ratio));
    }
    if !(view.scale > 0.0) {
        return Err(Error::InvalidScale(view.scale));
    }
    let p = [pivot.yaw, pivot.pitch];
    Ok(ViewTransform {
        scale: view.scale * scale_ratio,
        offset: [
            p[0] - (p[0] - view.offset[0]) * scale_ratio + pan[0],
            p[1] - (p[1] - view.offset[1]) * scale_ratio + pan[1],
        ],
    })
}
