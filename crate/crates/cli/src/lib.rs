//! Seeded, reproducible experiments over hypercyclic tuples, reported as JSON.

pub mod commands;
pub mod config;
pub mod input;
pub mod report;

pub use commands::run;
pub use config::{Command, ExperimentConfig, ToleranceOverrides, DEFAULT_SEED};
pub use report::{Diagnostic, RunReport, Stage};

use std::path::Path;

use serde_json::Value;

/// An `ExperimentConfig`, or a run report whose `config` is reused.
pub fn load_config(path: &Path) -> report::CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        let mut d = Diagnostic::new(Stage::Config, "Io", e.to_string());
        d.file = Some(path.display().to_string());
        d
    })?;
    let value: Value = input::parse_json(&text, path)?;
    let (value, prefix) = match value {
        Value::Object(mut map) if map.contains_key("config") && map.contains_key("result") => {
            (map.remove("config").unwrap_or(Value::Null), "config.")
        }
        other => (other, ""),
    };
    serde_path_to_error::deserialize(value).map_err(|e| {
        let mut d = Diagnostic::new(Stage::Config, "Schema", e.inner().to_string());
        let at = format!("{prefix}{}", e.path());
        d.path = Some(at);
        d.file = Some(path.display().to_string());
        d
    })
}
