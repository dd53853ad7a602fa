//! Artifact writers. Reports are JSON (machine checks) and CSV (series).
//! Nothing time- or path-dependent is ever written, so rerunning the same
//! configuration and seed reproduces every file byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use sha2::{Digest, Sha256};
use urnlab_core::{Kernel, SparseMeasure};

use crate::CliError;

/// First 16 hex characters of the SHA-256 of the kernel's canonical text.
pub fn kernel_hash(kernel: &Kernel) -> String {
    let digest = Sha256::digest(kernel.to_text().as_bytes());
    let mut hex = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// A finite float as a JSON number.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// A sparse measure as a JSON object keyed by color index (sorted, since
/// the underlying map is ordered).
pub fn measure_json(m: &SparseMeasure) -> Value {
    let map: serde_json::Map<String, Value> =
        m.iter().map(|(c, w)| (c.0.to_string(), num(w))).collect();
    Value::Object(map)
}

pub fn write_json(dir: &Path, name: &str, value: &Value) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    fs::write(&path, body)?;
    Ok(path)
}

pub fn write_csv<I>(dir: &Path, name: &str, header: &str, rows: I) -> Result<PathBuf, CliError>
where
    I: IntoIterator<Item = String>,
{
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut body = String::from(header);
    body.push('\n');
    for row in rows {
        body.push_str(&row);
        body.push('\n');
    }
    fs::write(&path, body)?;
    Ok(path)
}

/// Median of an unsorted sample; even lengths average the middle pair.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}
