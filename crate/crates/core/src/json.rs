//! Partial JSON documents layered over typed values.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// Recursively overlays `patch` onto `base`. Objects merge key by key;
/// anything else replaces.
pub fn merge(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(base), Value::Object(patch)) => {
            for (key, value) in patch {
                match base.get_mut(key) {
                    Some(slot) => merge(slot, value),
                    None => {
                        base.insert(key.clone(), value.clone());
                    }
                }
            }
        }
        (slot, value) => *slot = value.clone(),
    }
}

/// Applies a partial JSON document to a typed value.
pub fn apply_patch<T: Serialize + DeserializeOwned>(base: &T, patch: &Value) -> Result<T> {
    if !patch.is_object() {
        return Err(Error::Config("config patch must be a JSON object".into()));
    }
    let mut value = serde_json::to_value(base).map_err(|e| Error::Config(e.to_string()))?;
    merge(&mut value, patch);
    serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))
}
