//! Effective configuration: built-in defaults, then the config file, then
//! command-line overrides.
//!
//! ```json
//! {
//!   "fusion":   { "late_window_ms": 150, "transfer": { "mode": "visual_angle" } },
//!   "generate": { "seed": 7, "gaze_noise_std_deg": 0.1, "trial_plan": [ ... ] },
//!   "scene":    { "buffer_fraction": 0.5 }
//! }
//! ```
//!
//! Every section and field is optional. Unless the `generate` section sets
//! them itself, the generator's label windows and minimum fixation duration
//! follow the `fusion` section so labels match the engine being evaluated.

use std::path::Path;

use anyhow::{bail, Context};
use gazepinch::json::merge;
use gazepinch::trace::GenConfig;
use gazepinch::transfer::TransferMode;
use gazepinch::{FusionConfig, Scene};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Scene-level settings that a config file or flag may override.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub buffer_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub near_threshold_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reach_radius_m: Option<f64>,
}

impl SceneOverrides {
    pub fn apply(&self, scene: &mut Scene) -> gazepinch::Result<()> {
        if let Some(b) = self.buffer_fraction {
            scene.buffer_fraction = b;
        }
        if let Some(n) = self.near_threshold_m {
            scene.near_threshold_m = n;
        }
        if let Some(r) = self.reach_radius_m {
            scene.reach_radius_m = r;
        }
        scene.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub fusion: FusionConfig,
    pub generate: GenConfig,
    pub scene: SceneOverrides,
}

/// Flag values that override the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub noise: Option<f64>,
    pub buffer_fraction: Option<f64>,
    pub transfer_mode: Option<TransferMode>,
    pub late_window_ms: Option<u64>,
    pub early_window_ms: Option<u64>,
    pub grace_period_ms: Option<u64>,
    pub dispersion_threshold_deg: Option<f64>,
}

fn defaults_value() -> Value {
    json!({
        "fusion": FusionConfig::default(),
        "generate": {},
        "scene": {},
    })
}

impl CliConfig {
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> anyhow::Result<Self> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("cannot read config {}", p.display()))?;
                let v: Value =
                    serde_json::from_str(&text).with_context(|| format!("config {} is not valid JSON", p.display()))?;
                if !v.is_object() {
                    bail!("config {} must be a JSON object", p.display());
                }
                v
            }
            None => json!({}),
        };
        Self::from_value(&file, overrides).with_context(|| match path {
            Some(p) => format!("invalid config {}", p.display()),
            None => "invalid configuration".to_string(),
        })
    }

    pub fn from_value(file: &Value, overrides: &Overrides) -> anyhow::Result<Self> {
        if let Some(unknown) = file
            .as_object()
            .and_then(|o| o.keys().find(|k| !["fusion", "generate", "scene"].contains(&k.as_str())))
        {
            bail!("unknown section \"{unknown}\"");
        }
        let mut value = defaults_value();
        merge(&mut value, file);
        apply_flags(&mut value, overrides);

        let fusion: FusionConfig = serde_json::from_value(value["fusion"].clone()).context("fusion section")?;
        // generator windows follow the engine unless set explicitly
        let mut generate = json!({
            "early_window_ms": fusion.early_window_ms,
            "late_window_ms": fusion.late_window_ms,
            "fixation_min_duration_ms": fusion.fixation.min_duration_ms,
        });
        merge(&mut generate, &value["generate"]);
        let generate: GenConfig = serde_json::from_value(generate).context("generate section")?;
        let scene: SceneOverrides = serde_json::from_value(value["scene"].clone()).context("scene section")?;
        fusion.validate()?;
        Ok(Self {
            fusion,
            generate,
            scene,
        })
    }

    pub fn to_pretty_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

fn apply_flags(value: &mut Value, o: &Overrides) {
    let mut patch = json!({"fusion": {"fixation": {}, "transfer": {}}, "generate": {}, "scene": {}});
    if let Some(s) = o.seed {
        patch["generate"]["seed"] = json!(s);
    }
    if let Some(n) = o.noise {
        patch["generate"]["gaze_noise_std_deg"] = json!(n);
    }
    if let Some(b) = o.buffer_fraction {
        patch["scene"]["buffer_fraction"] = json!(b);
    }
    if let Some(m) = o.transfer_mode {
        patch["fusion"]["transfer"]["mode"] = json!(m);
    }
    if let Some(w) = o.late_window_ms {
        patch["fusion"]["late_window_ms"] = json!(w);
    }
    if let Some(w) = o.early_window_ms {
        patch["fusion"]["early_window_ms"] = json!(w);
    }
    if let Some(g) = o.grace_period_ms {
        patch["fusion"]["grace_period_ms"] = json!(g);
    }
    if let Some(d) = o.dispersion_threshold_deg {
        patch["fusion"]["fixation"]["dispersion_threshold_deg"] = json!(d);
    }
    merge(value, &patch);
}
