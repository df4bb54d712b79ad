//! Scenario files: TOML documents mirroring [`Scenario`], versioned by a
//! top-level `schema_version`.
//!
//! Every table rejects unknown keys and every omitted key takes its default.
//! A client may point at a trace CSV instead of listing samples inline:
//!
//! ```toml
//! [[clients]]
//! mobility = { kind = "trace", file = "walk.csv" }
//! ```
//!
//! The path is resolved relative to the scenario file. The effective
//! scenario written by [`to_toml`] always has the samples inline, so it
//! reproduces the run on its own.

use std::fs;
use std::path::Path;

use handoff_core::sim::Scenario;
use serde::Deserialize;
use toml::{Table, Value};

use crate::csvio::read_trace;
use crate::error::{AppError, Result};

pub const SCHEMA_VERSION: i64 = 1;

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| AppError::parse(path, e))?;
    parse_scenario(&text, path)
}

/// Parses and validates `text`. `origin` names the source in errors and
/// anchors relative trace paths.
pub fn parse_scenario(text: &str, origin: &Path) -> Result<Scenario> {
    let mut table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| AppError::parse(origin, e.to_string().trim_end()))?;
    match table.remove("schema_version") {
        None => return Err(AppError::parse(origin, "missing `schema_version`")),
        Some(Value::Integer(SCHEMA_VERSION)) => {}
        Some(v) => {
            return Err(AppError::parse(
                origin,
                format!("unsupported schema_version {v} (this build reads {SCHEMA_VERSION})"),
            ))
        }
    }
    resolve_trace_files(&mut table, origin)?;
    let sc =
        Scenario::deserialize(Value::Table(table)).map_err(|e| AppError::parse(origin, e.to_string().trim_end()))?;
    sc.validate()?;
    Ok(sc)
}

fn resolve_trace_files(table: &mut Table, origin: &Path) -> Result<()> {
    let Some(Value::Array(clients)) = table.get_mut("clients") else {
        return Ok(());
    };
    let base = origin.parent().unwrap_or(Path::new("."));
    for (i, client) in clients.iter_mut().enumerate() {
        let Some(Value::Table(m)) = client.get_mut("mobility") else {
            continue;
        };
        if m.get("kind").and_then(Value::as_str) != Some("trace") {
            continue;
        }
        let Some(file) = m.remove("file") else {
            continue;
        };
        let Value::String(file) = file else {
            return Err(AppError::parse(
                origin,
                format!("clients[{i}].mobility.file must be a string"),
            ));
        };
        if m.contains_key("samples") {
            return Err(AppError::parse(
                origin,
                format!("clients[{i}].mobility has both `file` and `samples`"),
            ));
        }
        let samples = read_trace(&base.join(file))?;
        let arr = Value::try_from(samples).map_err(|e| AppError::parse(origin, e))?;
        m.insert("samples".into(), arr);
    }
    Ok(())
}

/// Effective configuration as a scenario file.
pub fn to_toml(sc: &Scenario) -> String {
    let body = toml::to_string(sc).expect("scenario serializes to TOML");
    format!("schema_version = {SCHEMA_VERSION}\n{body}")
}
