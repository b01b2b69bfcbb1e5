//! Targets and buffered hit-testing.
//!
//! Targets are angular discs at a depth. A gaze point hits every target
//! whose disc, grown by `buffer_fraction` of its radius, contains it; the
//! nearest center wins and ties go to the smallest id. Authoring note: the
//! buffer works best when the salient part of a target sits at its center,
//! since that is where fixations cluster.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angular_distance, Direction, HandPosition};

pub type TargetId = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    Object,
    Canvas,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub id: TargetId,
    pub center: Direction,
    pub radius_deg: f64,
    pub depth_m: f64,
    pub kind: TargetKind,
    /// Accumulated drag displacement in chart degrees. Always zero for canvases.
    pub position_offset: [f64; 2],
}

impl Target {
    pub fn new(id: impl Into<TargetId>, yaw: f64, pitch: f64, radius_deg: f64, depth_m: f64, kind: TargetKind) -> Self {
        Self {
            id: id.into(),
            center: Direction::new(yaw, pitch),
            radius_deg,
            depth_m,
            kind,
            position_offset: [0.0, 0.0],
        }
    }

    /// Center after drag displacement.
    pub fn effective_center(&self) -> Direction {
        self.center.offset_by(self.position_offset)
    }

    /// Position in the head frame: the effective center direction scaled to depth.
    pub fn position(&self) -> HandPosition {
        let [x, y, z] = self.effective_center().to_unit_vector();
        HandPosition::new(x * self.depth_m, y * self.depth_m, z * self.depth_m)
    }

    pub fn is_canvas(&self) -> bool {
        self.kind == TargetKind::Canvas
    }

    fn validate(&self) -> Result<()> {
        let fail = |message: &str| {
            Err(Error::SceneValidation {
                target: self.id.clone(),
                message: message.to_string(),
            })
        };
        if self.id.is_empty() {
            return fail("id must not be empty");
        }
        if !(self.radius_deg > 0.0 && self.radius_deg <= 45.0) {
            return fail("radius_deg must be in (0, 45]");
        }
        if !(self.depth_m > 0.1) || !self.depth_m.is_finite() {
            return fail("depth_m must be > 0.1");
        }
        if !self.center.yaw.is_finite() || !self.center.pitch.is_finite() {
            return fail("center must be finite");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub targets: Vec<Target>,
    pub buffer_fraction: f64,
    pub near_threshold_m: f64,
    pub reach_radius_m: f64,
}

pub const DEFAULT_BUFFER_FRACTION: f64 = 0.5;
pub const DEFAULT_NEAR_THRESHOLD_M: f64 = 0.45;
pub const DEFAULT_REACH_RADIUS_M: f64 = 0.15;

impl Scene {
    pub fn new(targets: Vec<Target>) -> Result<Self> {
        let scene = Self {
            targets,
            buffer_fraction: DEFAULT_BUFFER_FRACTION,
            near_threshold_m: DEFAULT_NEAR_THRESHOLD_M,
            reach_radius_m: DEFAULT_REACH_RADIUS_M,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.buffer_fraction >= 0.0) || !self.buffer_fraction.is_finite() {
            return Err(Error::Scene("buffer_fraction must be >= 0".into()));
        }
        if !(self.reach_radius_m > 0.0) {
            return Err(Error::Scene("reach_radius_m must be > 0".into()));
        }
        if !(self.near_threshold_m > self.reach_radius_m) {
            return Err(Error::Scene(
                "near_threshold_m must exceed reach_radius_m".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for target in &self.targets {
            target.validate()?;
            if !seen.insert(target.id.as_str()) {
                return Err(Error::SceneValidation {
                    target: target.id.clone(),
                    message: "duplicate id".into(),
                });
            }
        }
        Ok(())
    }

    pub fn target(&self, id: &str) -> Option<&Target> {
        self.targets.iter().find(|t| t.id == id)
    }

    pub fn target_mut(&mut self, id: &str) -> Option<&mut Target> {
        self.targets.iter_mut().find(|t| t.id == id)
    }

    /// Target under a gaze point, honoring the buffer zone.
    pub fn hit_test(&self, point: Direction) -> Option<&Target> {
        let reach = 1.0 + self.buffer_fraction;
        self.targets
            .iter()
            .filter_map(|t| {
                let d = angular_distance(point, t.effective_center());
                (d <= t.radius_deg * reach).then_some((d, t))
            })
            .min_by(|(da, a), (db, b)| da.total_cmp(db).then_with(|| a.id.cmp(&b.id)))
            .map(|(_, t)| t)
    }

    /// Target within arm's reach of the hand, nearest first.
    pub fn hand_proximal_target(&self, hand: &HandPosition) -> Option<&Target> {
        self.targets
            .iter()
            .filter_map(|t| {
                let d = t.position().distance_to(hand);
                (d <= self.reach_radius_m).then_some((d, t))
            })
            .min_by(|(da, a), (db, b)| da.total_cmp(db).then_with(|| a.id.cmp(&b.id)))
            .map(|(_, t)| t)
    }

    /// Parses and validates a scene document.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SceneFile = serde_json::from_str(text).map_err(|e| Error::SceneParse {
            line: e.line(),
            message: e.to_string(),
        })?;
        let scene = Scene {
            targets: file
                .targets
                .into_iter()
                .map(|t| Target::new(t.id, t.yaw, t.pitch, t.radius_deg, t.depth_m, t.kind))
                .collect(),
            buffer_fraction: file.buffer_fraction,
            near_threshold_m: file.near_threshold_m,
            reach_radius_m: file.reach_radius_m,
        };
        scene.validate()?;
        Ok(scene)
    }

    /// Serializes the authored scene (drag offsets are not persisted).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("scene serializes")
    }

    pub(crate) fn to_file(&self) -> SceneFile {
        SceneFile {
            buffer_fraction: self.buffer_fraction,
            near_threshold_m: self.near_threshold_m,
            reach_radius_m: self.reach_radius_m,
            targets: self
                .targets
                .iter()
                .map(|t| TargetEntry {
                    id: t.id.clone(),
                    yaw: t.center.yaw,
                    pitch: t.center.pitch,
                    radius_deg: t.radius_deg,
                    depth_m: t.depth_m,
                    kind: t.kind,
                })
                .collect(),
        }
    }
}

pub fn load_scene(text: &str) -> Result<Scene> {
    Scene::from_json(text)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SceneFile {
    #[serde(default = "default_buffer")]
    pub buffer_fraction: f64,
    #[serde(default = "default_near")]
    pub near_threshold_m: f64,
    #[serde(default = "default_reach")]
    pub reach_radius_m: f64,
    pub targets: Vec<TargetEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct TargetEntry {
    pub id: String,
    pub yaw: f64,
    pub pitch: f64,
    pub radius_deg: f64,
    pub depth_m: f64,
    pub kind: TargetKind,
}

fn default_buffer() -> f64 {
    DEFAULT_BUFFER_FRACTION
}
fn default_near() -> f64 {
    DEFAULT_NEAR_THRESHOLD_M
}
fn default_reach() -> f64 {
    DEFAULT_REACH_RADIUS_M
}
