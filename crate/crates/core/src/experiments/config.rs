use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::ExperimentError;

/// Grid overrides shared by every experiment.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Keep every `record_stride`-th sample in trajectory files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_stride: Option<usize>,
}

/// A run request, as read from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub experiment: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub overrides: BTreeMap<String, Value>,
    #[serde(default)]
    pub grid: GridOverride,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn new(experiment: impl Into<String>) -> Self {
        ExperimentSpec {
            experiment: experiment.into(),
            seed: None,
            overrides: BTreeMap::new(),
            grid: GridOverride::default(),
            out_dir: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_override(mut self, path: impl Into<String>, value: Value) -> Self {
        self.overrides.insert(path.into(), value);
        self
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Parses a command-line `key=value` override. Values are read as JSON and
    /// fall back to plain strings.
    pub fn parse_override(arg: &str) -> Result<(String, Value), ExperimentError> {
        let (key, raw) = arg
            .split_once('=')
            .ok_or_else(|| ExperimentError::Config(format!("override {arg:?} is not of the form key=value")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ExperimentError::Config(format!("override {arg:?} has an empty path")));
        }
        let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
        Ok((key.to_string(), value))
    }
}

/// Replaces the leaf at a dotted path. The path must already exist.
pub fn apply_override(doc: &mut Value, path: &str, value: Value) -> Result<(), ExperimentError> {
    let mut node = doc;
    for part in path.split('.') {
        node = match node {
            Value::Object(map) => map.get_mut(part),
            Value::Array(items) => part.parse::<usize>().ok().and_then(move |i| items.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| ExperimentError::UnknownOverride(path.to_string()))?;
    }
    if node.is_object() && !value.is_object() {
        return Err(ExperimentError::Config(format!("override {path:?} replaces a parameter group with a scalar")));
    }
    *node = value;
    Ok(())
}

/// Flattens a document into dotted leaf paths; arrays are kept whole.
pub fn flatten(doc: &Value) -> BTreeMap<String, Value> {
    fn walk(prefix: &str, v: &Value, out: &mut BTreeMap<String, Value>) {
        match v {
            Value::Object(map) if !map.is_empty() => {
                for (k, child) in map {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&p, child, out);
                }
            }
            _ => {
                out.insert(prefix.to_string(), v.clone());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk("", doc, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn override_replaces_existing_leaf() {
        let mut doc = json!({"plant": {"a": 1.0, "c": 1.5}, "deltas": [0.0, 0.1]});
        apply_override(&mut doc, "plant.c", json!(2.0)).unwrap();
        apply_override(&mut doc, "deltas.1", json!(0.3)).unwrap();
        assert_eq!(doc, json!({"plant": {"a": 1.0, "c": 2.0}, "deltas": [0.0, 0.3]}));
    }

    #[test]
    fn unknown_path_is_rejected() {
        let mut doc = json!({"plant": {"a": 1.0}});
        for p in ["plant.b", "plant.a.x", "model", "plant"] {
            assert!(apply_override(&mut doc, p, json!(1.0)).is_err(), "{p}");
        }
        match apply_override(&mut doc, "plant.b", json!(1.0)) {
            Err(ExperimentError::UnknownOverride(p)) => assert_eq!(p, "plant.b"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flatten_roundtrips_through_overrides() {
        let doc = json!({"a": {"b": 1, "c": {"d": [1, 2]}}, "e": "x"});
        let flat = flatten(&doc);
        assert_eq!(flat.len(), 3);
        let mut blank = json!({"a": {"b": 0, "c": {"d": []}}, "e": ""});
        for (k, v) in flat {
            apply_override(&mut blank, &k, v).unwrap();
        }
        assert_eq!(blank, doc);
    }

    #[test]
    fn cli_override_parsing() {
        assert_eq!(ExperimentSpec::parse_override("a.b=0.5").unwrap(), ("a.b".into(), json!(0.5)));
        assert_eq!(ExperimentSpec::parse_override("m=synergistic").unwrap().1, json!("synergistic"));
        assert_eq!(ExperimentSpec::parse_override("d=[0,0.1]").unwrap().1, json!([0, 0.1]));
        assert!(ExperimentSpec::parse_override("novalue").is_err());
    }

    #[test]
    fn config_rejects_unknown_fields() {
        assert!(ExperimentSpec::from_json(r#"{"experiment": "if-sync", "sed": 3}"#).is_err());
        let s = ExperimentSpec::from_json(r#"{"experiment": "if-sync", "seed": 3, "grid": {"dt": 0.01}}"#).unwrap();
        assert_eq!((s.seed, s.grid.dt), (Some(3), Some(0.01)));
    }
}
