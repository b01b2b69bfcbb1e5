//! Session protocol (version 1) between live clients and a fusion engine.
//!
//! Every message is a JSON object carrying `"v":1` and a `"type"`. The
//! transport is left to the caller; the CLI serves it over WebSocket.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fusion::{Engine, EngineSnapshot, FusionConfig, InteractionEvent};
use crate::json::apply_patch;
use crate::scene::Scene;
use crate::trace::{record_from_json, TraceRecord};

pub const PROTOCOL_VERSION: u64 = 1;

/// Client → server.
#[derive(Debug, Clone, PartialEq)]
pub enum SessionMessage {
    Input(TraceRecord),
    /// Partial `FusionConfig` document, merged over the current config.
    ConfigUpdate(Value),
    SceneRequest,
    Reset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    Malformed,
    UnsupportedVersion,
    NonMonotonic,
    InvalidSample,
    ConfigLocked,
    InvalidConfig,
}

/// Server → client.
#[derive(Debug, Clone, PartialEq)]
pub enum ServerMessage {
    Event(InteractionEvent),
    StateSnapshot { snapshot: EngineSnapshot, config: FusionConfig },
    Scene(Value),
    Error { code: ErrorCode, message: String },
}

impl ServerMessage {
    fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        ServerMessage::Error {
            code,
            message: message.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ServerMessage::Event(_) => "event",
            ServerMessage::StateSnapshot { .. } => "state_snapshot",
            ServerMessage::Scene(_) => "scene",
            ServerMessage::Error { .. } => "error",
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            ServerMessage::Event(e) => json!({"v": PROTOCOL_VERSION, "type": "event", "event": e}),
            ServerMessage::StateSnapshot { snapshot, config } => json!({
                "v": PROTOCOL_VERSION,
                "type": "state_snapshot",
                "snapshot": snapshot,
                "config": config,
            }),
            ServerMessage::Scene(scene) => json!({"v": PROTOCOL_VERSION, "type": "scene", "scene": scene}),
            ServerMessage::Error { code, message } => json!({
                "v": PROTOCOL_VERSION,
                "type": "error",
                "code": code,
                "message": message,
            }),
        }
    }

    pub fn to_json(&self) -> String {
        self.to_value().to_string()
    }
}

impl SessionMessage {
    /// Parses one client frame. Errors carry the code to report back.
    pub fn parse(text: &str) -> std::result::Result<Self, (ErrorCode, String)> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| (ErrorCode::Malformed, format!("invalid JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or((ErrorCode::Malformed, "message must be a JSON object".to_string()))?;
        match obj.get("v") {
            Some(v) if v.as_u64() == Some(PROTOCOL_VERSION) => {}
            Some(v) => return Err((ErrorCode::UnsupportedVersion, format!("unsupported protocol version {v}"))),
            None => return Err((ErrorCode::Malformed, "missing \"v\"".into())),
        }
        let kind = obj
            .get("type")
            .and_then(Value::as_str)
            .ok_or((ErrorCode::Malformed, "missing \"type\"".to_string()))?;
        let allow_only = |allowed: &[&str]| {
            match obj.keys().find(|k| !["v", "type"].contains(&k.as_str()) && !allowed.contains(&k.as_str())) {
                Some(k) => Err((ErrorCode::Malformed, format!("unexpected field \"{k}\" in {kind} message"))),
                None => Ok(()),
            }
        };
        match kind {
            "input" => {
                allow_only(&["record"])?;
                let record = obj
                    .get("record")
                    .ok_or((ErrorCode::Malformed, "input message needs \"record\"".to_string()))?;
                record_from_json(&record.to_string())
                    .map(SessionMessage::Input)
                    .map_err(|m| (ErrorCode::Malformed, m))
            }
            "config_update" => {
                allow_only(&["config"])?;
                match obj.get("config") {
                    Some(c) if c.is_object() => Ok(SessionMessage::ConfigUpdate(c.clone())),
                    _ => Err((ErrorCode::Malformed, "config_update needs an object \"config\"".into())),
                }
            }
            "scene_request" => allow_only(&[]).map(|_| SessionMessage::SceneRequest),
            "reset" => allow_only(&[]).map(|_| SessionMessage::Reset),
            other => Err((ErrorCode::Malformed, format!("unknown message type \"{other}\""))),
        }
    }
}

/// One client's engine plus what it needs to start over.
#[derive(Debug, Clone)]
pub struct Session {
    scene: Scene,
    engine: Engine,
}

impl Session {
    pub fn new(scene: Scene, config: FusionConfig) -> Result<Self> {
        Ok(Self {
            engine: Engine::new(scene.clone(), config)?,
            scene,
        })
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    fn snapshot(&self) -> ServerMessage {
        ServerMessage::StateSnapshot {
            snapshot: self.engine.snapshot(),
            config: *self.engine.config(),
        }
    }

    /// Handles one raw text frame.
    pub fn handle_text(&mut self, text: &str) -> Vec<ServerMessage> {
        match SessionMessage::parse(text) {
            Ok(msg) => self.handle(msg),
            Err((code, message)) => vec![ServerMessage::error(code, message)],
        }
    }

    pub fn handle(&mut self, msg: SessionMessage) -> Vec<ServerMessage> {
        match msg {
            SessionMessage::Input(record) => match self.engine.step(record) {
                Ok(events) => {
                    let mut out: Vec<_> = events.into_iter().map(ServerMessage::Event).collect();
                    out.push(self.snapshot());
                    out
                }
                Err(e @ Error::NonMonotonic { .. }) => vec![ServerMessage::error(ErrorCode::NonMonotonic, e.to_string())],
                Err(e) => vec![ServerMessage::error(ErrorCode::InvalidSample, e.to_string())],
            },
            SessionMessage::ConfigUpdate(patch) => {
                if self.engine.gesture_active() {
                    return vec![ServerMessage::error(ErrorCode::ConfigLocked, Error::ConfigLocked.to_string())];
                }
                let result = apply_patch(self.engine.config(), &patch).and_then(|c| self.engine.set_config(c));
                match result {
                    Ok(events) => {
                        let mut out: Vec<_> = events.into_iter().map(ServerMessage::Event).collect();
                        out.push(self.snapshot());
                        out
                    }
                    Err(Error::ConfigLocked) => {
                        vec![ServerMessage::error(ErrorCode::ConfigLocked, Error::ConfigLocked.to_string())]
                    }
                    Err(e) => vec![ServerMessage::error(ErrorCode::InvalidConfig, e.to_string())],
                }
            }
            SessionMessage::SceneRequest => {
                let scene = serde_json::to_value(self.scene.to_file()).expect("scene serializes");
                vec![ServerMessage::Scene(scene)]
            }
            SessionMessage::Reset => {
                let config = *self.engine.config();
                self.engine = Engine::new(self.scene.clone(), config).expect("config was accepted before");
                vec![self.snapshot()]
            }
        }
    }
}
