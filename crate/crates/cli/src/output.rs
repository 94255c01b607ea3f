//! CSV and manifest writing.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Decimal text rounded to 12 significant digits, shortest form.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    format!("{rounded}")
}

/// Accumulates rows for one CSV file; the header is always written.
pub struct Table {
    name: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(name: &str, header: Vec<String>) -> Self {
        Table { name: name.into(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub rows: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub config_toml: String,
    pub seeds: Vec<u64>,
    pub out_dir: String,
    pub files: Vec<FileEntry>,
}

/// Write each table into `out_dir`, then `manifest.json` listing them.
pub fn write_run(
    out_dir: &Path,
    command: &str,
    config: &crate::config::FileConfig,
    seeds: &[u64],
    tables: &[Table],
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    let mut paths = Vec::new();
    for t in tables {
        let bytes = t.to_bytes()?;
        let path = out_dir.join(t.name());
        fs::write(&path, &bytes)?;
        files.push(FileEntry {
            name: t.name().into(),
            rows: t.len(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        paths.push(path);
    }
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        command: command.into(),
        config: serde_json::to_value(config).map_err(|e| CliError::Config(e.to_string()))?,
        config_toml: config.to_toml(),
        seeds: seeds.to_vec(),
        out_dir: out_dir.display().to_string(),
        files,
    };
    let path = out_dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text)?;
    paths.push(path);
    Ok(paths)
}
