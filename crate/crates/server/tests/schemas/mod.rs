//! Checks JSON documents against the schema files in `docs/api`.
#![allow(dead_code)]

use std::path::PathBuf;

use jsonschema::Registry;
use serde_json::{json, Value};

const BASE: &str = "https://cardpipe.invalid/schemas/v1/";

fn docs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/api")
}

pub fn names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(docs_dir())
        .unwrap()
        .filter_map(|e| {
            e.ok()?
                .file_name()
                .into_string()
                .ok()?
                .strip_suffix(".schema.json")
                .map(str::to_string)
        })
        .collect();
    names.sort();
    names
}

/// Validates `instance` against `docs/api/<name>.schema.json`.
pub fn check(name: &str, instance: &Value) -> Result<(), String> {
    let mut builder = Registry::new();
    for n in names() {
        let text = std::fs::read_to_string(docs_dir().join(format!("{n}.schema.json"))).unwrap();
        let schema: Value = serde_json::from_str(&text).map_err(|e| format!("{n}: {e}"))?;
        builder = builder
            .add(format!("{BASE}{n}.schema.json"), schema)
            .map_err(|e| e.to_string())?;
    }
    let registry = builder.prepare().map_err(|e| e.to_string())?;
    let root = json!({ "$ref": format!("{BASE}{name}.schema.json") });
    let validator = jsonschema::options()
        .with_registry(&registry)
        .build(&root)
        .map_err(|e| e.to_string())?;
    let errors: Vec<String> = validator
        .iter_errors(instance)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(format!("{name}: {}", errors.join("; ")))
    }
}
