//! Scenario files bundled into the binary, one per experiment.

use std::path::Path;

use handoff_core::sim::Scenario;

use crate::error::{AppError, Result};
use crate::scenario_file::parse_scenario;

pub const PRESETS: [(&str, &str); 7] = [
    ("tour", include_str!("../presets/tour.toml")),
    ("omrf", include_str!("../presets/omrf.toml")),
    ("clients4", include_str!("../presets/clients4.toml")),
    ("clients4_omrf", include_str!("../presets/clients4_omrf.toml")),
    ("wide", include_str!("../presets/wide.toml")),
    ("greedy", include_str!("../presets/greedy.toml")),
    ("static", include_str!("../presets/static.toml")),
];

pub const PREFIX: &str = "preset:";

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn load_preset(name: &str) -> Result<Scenario> {
    let text = preset_text(name).ok_or_else(|| {
        let names: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
        AppError::Usage(format!("unknown preset `{name}` (available: {})", names.join(", ")))
    })?;
    parse_scenario(text, Path::new(&format!("{PREFIX}{name}")))
}

/// `preset:<name>` or a path to a scenario file.
pub fn load(spec: &str) -> Result<Scenario> {
    match spec.strip_prefix(PREFIX) {
        Some(name) => load_preset(name),
        None => crate::scenario_file::load_scenario(Path::new(spec)),
    }
}
