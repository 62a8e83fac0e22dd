//! Deterministic result emission.
//!
//! CSV: one header row of column names, one row per index, every number
//! rendered with 9 significant digits, LF line endings. JSON: the object
//! `{name, metadata, columns: {name: [...]}}` with full-precision numbers
//! (non-finite values become `null`, as JSON requires). Files are written
//! to a temporary name and renamed into place, so no partial file survives
//! a failure. Identical invocations produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dude_core::scenario::ScenarioResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// 9-significant-digit rendering used for every CSV number.
pub fn format_sig9(x: f64) -> String {
    format!("{x:.8e}")
}

fn csv_bytes(result: &ScenarioResult) -> Vec<u8> {
    let mut out = String::new();
    let names: Vec<&str> = result.columns.iter().map(|c| c.name.as_str()).collect();
    out.push_str(&names.join(","));
    out.push('\n');
    for row in 0..result.n_rows() {
        let mut first = true;
        for col in &result.columns {
            if !first {
                out.push(',');
            }
            out.push_str(&format_sig9(col.values[row]));
            first = false;
        }
        out.push('\n');
    }
    out.into_bytes()
}

fn json_bytes(result: &ScenarioResult) -> Vec<u8> {
    let mut columns = serde_json::Map::new();
    for col in &result.columns {
        columns.insert(
            col.name.clone(),
            serde_json::Value::from(col.values.clone()),
        );
    }
    let mut metadata = serde_json::Map::new();
    for (k, v) in &result.metadata {
        metadata.insert(k.clone(), serde_json::Value::from(v.clone()));
    }
    let doc = serde_json::json!({
        "name": result.name,
        "metadata": metadata,
        "columns": columns,
    });
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("string/number tree always serializes");
    bytes.push(b'\n');
    bytes
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().expect("emit paths always have a parent");
    let tmp: PathBuf = dir.join(format!(
        ".tmp-{}",
        path.file_name()
            .expect("emit paths have file names")
            .to_string_lossy()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Writes one result into `dir`, returning the created path.
pub fn emit(result: &ScenarioResult, dir: &Path, format: OutputFormat) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let (ext, bytes) = match format {
        OutputFormat::Csv => ("csv", csv_bytes(result)),
        OutputFormat::Json => ("json", json_bytes(result)),
    };
    let path = dir.join(format!("{}.{ext}", result.name));
    write_atomic(&path, &bytes)?;
    Ok(path)
}
