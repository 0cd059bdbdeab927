//! Configuration loading for experiment runs.
//!
//! Configs are JSON files deserialized into per-command structs. Every field
//! has a default, unknown keys are rejected, and command-line overrides of
//! the form `key=value` (with dotted paths like `kernel.delta=0.01`) are
//! spliced into the JSON tree before typed deserialization, so an override
//! always beats the file.

use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};

/// Reads and parses a JSON config file, then applies overrides in order.
/// Parse failures surface as config errors carrying the line and column.
pub fn load_raw(path: &Path, overrides: &[String]) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if !value.is_object() {
        return Err(Error::Config(format!(
            "{}: top level must be a JSON object",
            path.display()
        )));
    }
    for entry in overrides {
        apply_override(&mut value, entry)?;
    }
    Ok(value)
}

/// Deserializes the merged JSON into a typed config. Unknown keys and type
/// mismatches are reported with the offending key name.
pub fn from_value<T: serde::de::DeserializeOwned>(raw: &Value) -> Result<T> {
    serde_json::from_value(raw.clone()).map_err(|e| Error::Config(e.to_string()))
}

/// Applies one `key=value` override. The value is parsed as JSON when
/// possible (numbers, arrays, booleans) and kept as a string otherwise, so
/// `epsilon=0.02`, `sigma=[1,0]` and `profile.kind=compact_bump` all work.
fn apply_override(root: &mut Value, entry: &str) -> Result<()> {
    let (key, text) = entry
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{entry}' is not of the form key=value")))?;
    if key.is_empty() {
        return Err(Error::Config(format!("override '{entry}' has an empty key")));
    }
    let value = serde_json::from_str(text).unwrap_or_else(|_| Value::String(text.to_string()));
    set_path(root, key, value)
}

/// Sets a dotted path inside a JSON object tree, creating intermediate
/// objects as needed.
fn set_path(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut node = root;
    let mut segments = path.split('.').peekable();
    while let Some(segment) = segments.next() {
        let map = node.as_object_mut().ok_or_else(|| {
            Error::Config(format!("override path '{path}' descends into a non-object"))
        })?;
        if segments.peek().is_none() {
            map.insert(segment.to_string(), value);
            return Ok(());
        }
        node = map
            .entry(segment.to_string())
            .or_insert_with(|| Value::Object(serde_json::Map::new()));
    }
    unreachable!("split always yields at least one segment")
}
