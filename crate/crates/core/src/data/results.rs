//! Result files.
//!
//! JSON output is canonical: keys sorted, floats in shortest round-trip
//! form, so reading and re-writing a file reproduces it byte for byte. CSV
//! output is long format with one row per metric element.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tasks::{ExperimentResult, RESULT_SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResultFormat {
    Json,
    Csv,
}

impl ResultFormat {
    /// Format implied by a file extension, if any.
    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()?.to_str()?.parse().ok()
    }
}

impl FromStr for ResultFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::config("format", format!("unknown result format {other:?} (json or csv)"))),
        }
    }
}

fn check_finite(result: &ExperimentResult) -> Result<()> {
    for run in &result.runs {
        for (key, values) in &run.metrics {
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteMetric(format!("{}.{key}", run.engine)));
            }
        }
    }
    Ok(())
}

pub fn to_canonical_json(result: &ExperimentResult) -> Result<String> {
    check_finite(result)?;
    // `Value` objects are B-tree maps, which fixes the key order.
    let value = serde_json::to_value(result)?;
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}

pub fn to_csv(result: &ExperimentResult) -> Result<Vec<u8>> {
    check_finite(result)?;
    let prefix = result.engines().len() > 1;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["experiment", "seed", "key", "index", "value"])?;
    for run in &result.runs {
        for (key, values) in &run.metrics {
            let key = if prefix { format!("{}.{key}", run.engine) } else { key.clone() };
            for (i, v) in values.iter().enumerate() {
                w.write_record([
                    result.experiment.as_str(),
                    &run.seed.to_string(),
                    &key,
                    &i.to_string(),
                    &v.to_string(),
                ])?;
            }
        }
    }
    w.into_inner().map_err(|e| Error::io("csv buffer", e.into_error()))
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn write_results(result: &ExperimentResult, path: &Path, format: ResultFormat) -> Result<()> {
    let bytes = match format {
        ResultFormat::Json => to_canonical_json(result)?.into_bytes(),
        ResultFormat::Csv => to_csv(result)?,
    };
    write_atomic(path, &bytes)
}

/// Reads a JSON result file, checking its schema version.
pub fn read_results(path: &Path) -> Result<ExperimentResult> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let version = value.get("schema_version").and_then(|v| v.as_u64());
    if version != Some(RESULT_SCHEMA_VERSION as u64) {
        return Err(Error::config(
            "schema_version",
            format!("{}: found {version:?}, expected {RESULT_SCHEMA_VERSION}", path.display()),
        ));
    }
    Ok(serde_json::from_value(value)?)
}
