//! Layering of built-in defaults, a JSON config file and explicit flags.

use std::path::Path;

use anyhow::Context;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

/// A user-facing configuration problem; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Recursively merges `overlay` into `base`; objects merge key by key, every
/// other value replaces.
pub fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

pub fn read_config_file(path: &Path) -> anyhow::Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| config_error(format!("config {}: {e}", path.display())))?;
    if !value.is_object() {
        return Err(config_error(format!("config {}: expected a JSON object", path.display())));
    }
    Ok(value)
}

/// `defaults`, overridden by the file (if any), overridden by `flags`.
pub fn layered<T: Serialize + DeserializeOwned>(
    defaults: &T,
    file: Option<&Value>,
    flags: Map<String, Value>,
) -> anyhow::Result<T> {
    let mut value = serde_json::to_value(defaults)?;
    if let Some(f) = file {
        merge(&mut value, f.clone());
    }
    merge(&mut value, Value::Object(flags));
    serde_json::from_value(value).map_err(|e| config_error(format!("invalid configuration: {e}")))
}

/// Collects the flags that were given on the command line.
#[derive(Default)]
pub struct Flags(pub Map<String, Value>);

impl Flags {
    pub fn set<V: Serialize>(&mut self, key: &str, v: Option<V>) -> &mut Self {
        if let Some(v) = v {
            self.0.insert(key.into(), serde_json::to_value(v).expect("flag value serializes"));
        }
        self
    }

    pub fn flag(&mut self, key: &str, on: bool) -> &mut Self {
        if on {
            self.0.insert(key.into(), Value::Bool(true));
        }
        self
    }

    pub fn contains(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }
}
