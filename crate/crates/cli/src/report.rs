use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::input::write_columns;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    /// File name as given on the command line or in the config.
    pub path: String,
    pub sha256: String,
}

/// Columns of one plot series; `columns` are `name (unit)` labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub description: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    /// SHA-256 over the per-file digests in input order.
    pub inputs_digest: String,
    pub inputs: Vec<InputRecord>,
    pub config: Value,
    pub results: Value,
    pub provenance_notes: Vec<String>,
    pub warnings: Vec<String>,
    pub series: BTreeMap<String, Series>,
    pub timestamp: Option<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            inputs_digest: digest_of(&[]),
            inputs: Vec::new(),
            config: Value::Null,
            results: Value::Null,
            provenance_notes: Vec::new(),
            warnings: Vec::new(),
            series: BTreeMap::new(),
            timestamp: None,
        }
    }

    pub fn add_input(&mut self, path: &Path, sha256: String) {
        self.inputs.push(InputRecord {
            path: path.display().to_string(),
            sha256,
        });
        let hashes: Vec<&str> = self.inputs.iter().map(|i| i.sha256.as_str()).collect();
        self.inputs_digest = digest_of(&hashes);
    }

    pub fn add_series(&mut self, kind: &str, description: &str, columns: &[&str], rows: Vec<Vec<f64>>) {
        self.series.insert(
            kind.to_string(),
            Series {
                description: description.to_string(),
                columns: columns.iter().map(|c| c.to_string()).collect(),
                rows,
            },
        );
    }

    pub fn note(&mut self, s: impl Into<String>) {
        let s = s.into();
        if !self.provenance_notes.contains(&s) {
            self.provenance_notes.push(s);
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn digest_of(hashes: &[&str]) -> String {
    let mut h = Sha256::new();
    for d in hashes {
        h.update(d.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub kind: String,
    pub description: String,
    pub columns: Vec<String>,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub inputs_digest: String,
    pub series: Vec<ManifestEntry>,
}

/// Write the report's plot series (all, or only `kind`) as
/// `<command>_<kind>.csv` files plus `manifest.json` into `dir`.
pub fn emit_plot_data(report: &Report, kind: Option<&str>, dir: &Path) -> CliResult<Vec<PathBuf>> {
    let selected: Vec<(&String, &Series)> = match kind {
        Some(k) => report.series.get_key_value(k).into_iter().collect(),
        None => report.series.iter().collect(),
    };
    if selected.is_empty() {
        return Err(CliError::MissingSeries(kind.map(str::to_string)));
    }
    let mut written = Vec::new();
    let mut entries = Vec::new();
    for (name, series) in selected {
        let file = format!("{}_{}.csv", report.command, name);
        let path = dir.join(&file);
        write_columns(&path, &series.columns, &series.rows)?;
        entries.push(ManifestEntry {
            file,
            kind: name.clone(),
            description: series.description.clone(),
            columns: series.columns.clone(),
            rows: series.rows.len(),
        });
        written.push(path);
    }
    let manifest = Manifest {
        command: report.command.clone(),
        inputs_digest: report.inputs_digest.clone(),
        series: entries,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    written.push(path);
    Ok(written)
}
