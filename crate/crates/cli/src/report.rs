use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ExperimentConfig;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub result: Value,
    /// Command-specific outcome label, compared against `--expect`.
    pub verdict: Option<String>,
    pub expectation_met: Option<bool>,
    pub wall_time_seconds: f64,
}

/// A measured quantity next to the bound it was held to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checked {
    pub value: f64,
    pub tolerance: f64,
    pub ok: bool,
}

impl Checked {
    pub fn at_most(value: f64, tolerance: f64) -> Checked {
        Checked {
            value,
            tolerance,
            ok: value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Config,
    Input,
    Algebra,
    Characters,
    Construct,
    Expmap,
    Orbit,
    Kronecker,
    Output,
}

/// Structured failure, printed as JSON on stderr.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub stage: Stage,
    pub kind: String,
    pub message: String,
    /// Location inside a JSON document, for schema errors.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub file: Option<String>,
}

impl Diagnostic {
    pub fn new(stage: Stage, kind: &str, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            stage,
            kind: kind.into(),
            message: message.into(),
            path: None,
            file: None,
        }
    }

    pub fn core(stage: Stage, e: hypertuple_core::Error) -> Diagnostic {
        let kind = format!("{e:?}");
        let kind = kind.split(['(', ' ', '{']).next().unwrap_or("Error").to_string();
        Diagnostic::new(stage, &kind, e.to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "schema_version": REPORT_SCHEMA_VERSION, "error": self }).to_string()
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:?}] {}: {}", self.stage, self.kind, self.message)?;
        if let Some(p) = &self.path {
            write!(f, " at `{p}`")?;
        }
        Ok(())
    }
}

pub type CliResult<T> = Result<T, Diagnostic>;

/// Lowercase alphanumerics only, so `DENSE_EVIDENCE`, `dense-evidence`
/// and `DenseEvidence` compare equal.
pub fn normalize_label(s: &str) -> String {
    s.chars().filter(|c| c.is_ascii_alphanumeric()).map(|c| c.to_ascii_lowercase()).collect()
}
