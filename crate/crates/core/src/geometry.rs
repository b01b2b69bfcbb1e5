//! Angular coordinate math shared by the rest of the engine.
//!
//! Gaze directions live in a head-relative yaw/pitch chart measured in
//! degrees. Exact great-circle distances are used for hit-testing; the chart
//! itself is treated as flat for dispersion and transfer math, which is fine
//! inside the narrow field of view where targets live.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum hand-to-eye distance accepted when converting hand motion to a
/// visual angle.
pub const MIN_HAND_DISTANCE_M: f64 = 0.05;

/// Sanity bound on the norm of a tracked hand position.
pub const MAX_HAND_REACH_M: f64 = 2.0;

/// Head-relative gaze or target direction.
///
/// `yaw` is positive to the right and wraps into `[-180, 180)`; `pitch` is
/// positive upwards and clamped to `[-90, 90]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub yaw: f64,
    pub pitch: f64,
}

impl Direction {
    /// Builds a direction, wrapping yaw and clamping pitch into range.
    pub fn new(yaw: f64, pitch: f64) -> Self {
        Self {
            yaw: wrap_yaw(yaw),
            pitch: pitch.clamp(-90.0, 90.0),
        }
    }

    pub const ZERO: Direction = Direction { yaw: 0.0, pitch: 0.0 };

    /// Shifts the direction by a chart-space offset in degrees.
    pub fn offset_by(self, delta: [f64; 2]) -> Self {
        Self::new(self.yaw + delta[0], self.pitch + delta[1])
    }

    /// Unit vector in the head frame (x right, y up, z forward).
    pub fn to_unit_vector(self) -> [f64; 3] {
        let (yaw, pitch) = (self.yaw.to_radians(), self.pitch.to_radians());
        [pitch.cos() * yaw.sin(), pitch.sin(), pitch.cos() * yaw.cos()]
    }
}

fn wrap_yaw(yaw: f64) -> f64 {
    if (-180.0..180.0).contains(&yaw) {
        return yaw;
    }
    let wrapped = (yaw + 180.0).rem_euclid(360.0) - 180.0;
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if wrapped >= 180.0 {
        wrapped - 360.0
    } else {
        wrapped
    }
}

/// Head-relative hand position in meters (x right, y up, z forward).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandPosition {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl HandPosition {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance_to(&self, other: &HandPosition) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Finite components within the reach sanity bound.
    pub fn is_plausible(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.z.is_finite()
            && self.norm() <= MAX_HAND_REACH_M
    }

    /// Lateral and vertical motion from `from` to `self`.
    pub fn lateral_delta_from(&self, from: &HandPosition) -> [f64; 2] {
        [self.x - from.x, self.y - from.y]
    }

    pub fn midpoint(&self, other: &HandPosition) -> HandPosition {
        HandPosition::new(
            (self.x + other.x) / 2.0,
            (self.y + other.y) / 2.0,
            (self.z + other.z) / 2.0,
        )
    }
}

/// Great-circle angle between two directions, in degrees within `[0, 180]`.
pub fn angular_distance(a: Direction, b: Direction) -> f64 {
    let u = a.to_unit_vector();
    let v = b.to_unit_vector();
    let cross = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let cross_norm = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    cross_norm.atan2(dot).to_degrees()
}

/// Angle subtended by a lateral/vertical hand motion at `hand_distance`.
pub fn hand_delta_to_visual_angle(delta: [f64; 2], hand_distance: f64) -> Result<[f64; 2]> {
    if !(hand_distance > MIN_HAND_DISTANCE_M) {
        return Err(Error::DegenerateHandDistance(hand_distance));
    }
    Ok([
        (delta[0] / hand_distance).atan().to_degrees(),
        (delta[1] / hand_distance).atan().to_degrees(),
    ])
}

/// I-DT dispersion: yaw span plus pitch span.
pub fn dispersion(points: &[Direction]) -> Result<f64> {
    let first = points.first().ok_or(Error::EmptyWindow)?;
    let mut bounds = SpanBounds::new(*first);
    for p in &points[1..] {
        bounds.include(*p);
    }
    Ok(bounds.dispersion())
}

/// Running min/max of a set of chart points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SpanBounds {
    min_yaw: f64,
    max_yaw: f64,
    min_pitch: f64,
    max_pitch: f64,
}

impl SpanBounds {
    pub(crate) fn new(p: Direction) -> Self {
        Self {
            min_yaw: p.yaw,
            max_yaw: p.yaw,
            min_pitch: p.pitch,
            max_pitch: p.pitch,
        }
    }

    pub(crate) fn include(&mut self, p: Direction) {
        self.min_yaw = self.min_yaw.min(p.yaw);
        self.max_yaw = self.max_yaw.max(p.yaw);
        self.min_pitch = self.min_pitch.min(p.pitch);
        self.max_pitch = self.max_pitch.max(p.pitch);
    }

    pub(crate) fn with(mut self, p: Direction) -> Self {
        self.include(p);
        self
    }

    pub(crate) fn dispersion(&self) -> f64 {
        (self.max_yaw - self.min_yaw) + (self.max_pitch - self.min_pitch)
    }
}
