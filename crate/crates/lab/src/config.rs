//! JSON configuration documents merged with command-line flags.
//!
//! Every subcommand's arguments form one flat record. A `--config` file holds
//! a JSON object with the same snake_case keys; flags given on the command
//! line replace the file's values. Unknown keys are rejected.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};
use weierstrass_core::{PeriodicFunction, Primitive};

use crate::error::{LabError, Result};

/// A base function: a short name or a full JSON description.
#[derive(Debug, Clone, PartialEq)]
pub enum GSpec {
    Named(String),
    Function(PeriodicFunction),
}

impl GSpec {
    pub fn build(&self) -> Result<PeriodicFunction> {
        match self {
            GSpec::Function(f) => Ok(f.clone()),
            GSpec::Named(name) => match name.as_str() {
                "cosine" => Ok(PeriodicFunction::cosine()),
                "sine" => Ok(PeriodicFunction::single(Primitive::Sine)?),
                "triangle" | "takagi" => Ok(PeriodicFunction::triangle()),
                "zero" => Ok(PeriodicFunction::zero()),
                other => Err(LabError::config(
                    "g",
                    format!("unknown function `{other}` (expected cosine, sine, triangle, zero or a JSON object)"),
                )),
            },
        }
    }

    pub fn id(&self) -> String {
        match self {
            GSpec::Named(n) => n.clone(),
            GSpec::Function(f) => serde_json::to_string(f).unwrap_or_default(),
        }
    }
}

impl FromStr for GSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let t = s.trim();
        if t.starts_with('{') {
            serde_json::from_str(t).map(GSpec::Function).map_err(|e| e.to_string())
        } else {
            Ok(GSpec::Named(t.to_string()))
        }
    }
}

impl Serialize for GSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GSpec::Named(n) => s.serialize_str(n),
            GSpec::Function(f) => f.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for GSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) => Ok(GSpec::Named(s)),
            v => PeriodicFunction::deserialize(v).map(GSpec::Function).map_err(serde::de::Error::custom),
        }
    }
}

fn read_object(path: &Path) -> Result<Map<String, Value>> {
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(LabError::config("config", "top level must be a JSON object")),
        Err(e) => Err(LabError::config("config", e)),
    }
}

/// Merges `flags` over the optional config file and re-reads the result.
pub fn resolve<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> Result<T> {
    let mut merged = match config {
        Some(p) => read_object(p)?,
        None => Map::new(),
    };
    let flag_values = serde_json::to_value(flags).map_err(|e| LabError::config("flags", e))?;
    if let Value::Object(m) = flag_values {
        for (k, v) in m {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    let merged = Value::Object(merged);
    let out: T = serde_path_to_error::deserialize(&merged).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { blame_key::<T>(&merged).unwrap_or(path) } else { path };
        LabError::config(&path, e.into_inner())
    })?;
    let known = serde_json::to_value(&out).map_err(|e| LabError::config("config", e))?;
    if let (Value::Object(input), Value::Object(known)) = (&merged, &known) {
        if let Some(k) = input.iter().find(|(k, v)| !v.is_null() && !known.contains_key(*k)).map(|(k, _)| k) {
            return Err(LabError::config(k, "unknown field"));
        }
    }
    Ok(out)
}

/// Flattened records lose the error path; find the first key that fails alone.
fn blame_key<T: DeserializeOwned>(merged: &Value) -> Option<String> {
    let Value::Object(m) = merged else { return None };
    m.iter()
        .find(|(k, v)| {
            let single = Value::Object(Map::from_iter([((*k).clone(), (*v).clone())]));
            serde_json::from_value::<T>(single).is_err()
        })
        .map(|(k, _)| k.clone())
}

/// Returns `Err` naming `field` unless `ok`.
pub fn require(ok: bool, field: &str, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(LabError::config(field, reason))
    }
}
