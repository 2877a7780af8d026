//! CSV, JSON and metadata files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ExperimentConfig, SCHEMA_VERSION};
use crate::error::{HarnessError, Result};

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e)),
        _ => Ok(()),
    }
}

/// Renders rows under a fixed header. The header is written even when
/// there are no rows.
pub fn csv_string<T: Serialize>(columns: &[&str], rows: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(columns)?;
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Serialize(e.to_string()))
}

pub fn write_csv<T: Serialize>(path: &Path, columns: &[&str], rows: &[T]) -> Result<()> {
    let text = csv_string(columns, rows)?;
    write_text(path, &text)
}

pub fn json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &json_string(value)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

/// Description of a run, written next to its outputs. Contains nothing
/// that varies between identical runs.
#[derive(Debug, Serialize)]
pub struct Metadata<'a> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub linear_algebra: &'static str,
    pub experiment: String,
    pub master_seed: u64,
    pub outputs: Vec<String>,
    pub config: &'a ExperimentConfig,
}

pub fn metadata<'a>(config: &'a ExperimentConfig, outputs: &[PathBuf]) -> Metadata<'a> {
    Metadata {
        schema_version: SCHEMA_VERSION,
        tool: "chaoscorr",
        version: env!("CARGO_PKG_VERSION"),
        core_version: chaoscorr_core::VERSION,
        linear_algebra: "LAPACK via OpenBLAS",
        experiment: config.experiment.to_string(),
        master_seed: config.master_seed,
        outputs: outputs
            .iter()
            .map(|p| {
                p.file_name()
                    .map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_default()
            })
            .collect(),
        config,
    }
}

/// Writes `<stem>.meta.json` in the output directory.
pub fn write_metadata(config: &ExperimentConfig, stem: &str, outputs: &[PathBuf]) -> Result<PathBuf> {
    let path = config.output_dir.join(format!("{stem}.meta.json"));
    write_json(&path, &metadata(config, outputs))?;
    Ok(path)
}
