use std::path::Path;

use hypertuple_core::numkit::{Field, Matrix, C64};
use hypertuple_core::orbit::BoxRegion;
use hypertuple_core::TupleSpec;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::report::{CliResult, Diagnostic, Stage};

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| {
        let mut d = Diagnostic::new(Stage::Input, "Io", e.to_string());
        d.file = Some(path.display().to_string());
        d
    })
}

fn schema_error(path: &Path, at: String, message: String) -> Diagnostic {
    let mut d = Diagnostic::new(Stage::Input, "Schema", message);
    d.path = Some(if at.is_empty() { ".".into() } else { at });
    d.file = Some(path.display().to_string());
    d
}

/// Parses JSON into `T`, naming the offending location on failure.
pub fn parse_json<T: DeserializeOwned>(text: &str, path: &Path) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        schema_error(path, at, e.into_inner().to_string())
    })
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    parse_json(&read(path)?, path)
}

/// A bare TupleSpec, or a run report whose `result` is one.
pub fn load_tuple(path: &Path) -> CliResult<TupleSpec> {
    let text = read(path)?;
    let value: Value = parse_json(&text, path)?;
    let (value, prefix) = match value {
        Value::Object(mut map) if map.contains_key("config") && map.contains_key("result") => {
            (map.remove("result").unwrap_or(Value::Null), "result.")
        }
        other => (other, ""),
    };
    let tuple: TupleSpec = serde_path_to_error::deserialize(value).map_err(|e| {
        let at = format!("{prefix}{}", e.path());
        schema_error(path, at, e.into_inner().to_string())
    })?;
    tuple.check_shape().map_err(|e| {
        let mut d = Diagnostic::core(Stage::Input, e);
        d.file = Some(path.display().to_string());
        d
    })?;
    Ok(tuple)
}

pub fn load_matrix(path: &Path) -> CliResult<Matrix> {
    load_json(path)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VectorRepr {
    Complex(Vec<[f64; 2]>),
    Real(Vec<f64>),
}

pub fn load_vector(path: &Path) -> CliResult<Vec<C64>> {
    Ok(match load_json::<VectorRepr>(path)? {
        VectorRepr::Complex(v) => v.into_iter().map(|[re, im]| C64::new(re, im)).collect(),
        VectorRepr::Real(v) => v.into_iter().map(|re| C64::new(re, 0.0)).collect(),
    })
}

pub fn parse_floats(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| Diagnostic::new(Stage::Config, "InvalidInput", format!("{what}: `{p}`: {e}")))
        })
        .collect()
}

pub fn parse_region(s: &str, field: Field, n: usize) -> CliResult<BoxRegion> {
    let v = parse_floats(s, "box")?;
    let axes = match field {
        Field::Real => n,
        Field::Complex => 2 * n,
    };
    let region = match v.len() {
        2 => BoxRegion::cube(field, n, v[0], v[1]),
        k if k == 2 * axes => {
            let lo = v.iter().step_by(2).copied().collect();
            let hi = v.iter().skip(1).step_by(2).copied().collect();
            BoxRegion::new(field, n, lo, hi)
        }
        k => {
            return Err(Diagnostic::new(
                Stage::Config,
                "InvalidInput",
                format!("box needs 2 or {} bounds, got {k}", 2 * axes),
            ))
        }
    };
    region.map_err(|e| Diagnostic::core(Stage::Config, e))
}
