//! CSV/JSON writers and the run manifest.
//!
//! Floats in CSV are written as `{:.16e}` (17 significant digits), which
//! round-trips every `f64` exactly; JSON uses serde_json's shortest
//! round-trip form. Non-finite values are written as `NaN`/`inf` in CSV and
//! `null` in JSON.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use adw_core::Tolerances;

use crate::config::{Mode, RunConfig};
use crate::error::CliError;

pub const MANIFEST_SCHEMA: &str = "adw-manifest/1";
pub const MANIFEST_FILE: &str = "manifest.json";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub file: String,
    /// `csv`, `json` or `svg`.
    pub kind: String,
    /// Versioned column/document schema, e.g. `branches/1`.
    pub schema: String,
    /// Data rows (CSV) or top-level records (JSON).
    pub rows: usize,
    pub sha256: String,
    /// Set when the run failed after this file was written.
    pub partial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub tool: String,
    pub version: String,
    pub mode: Mode,
    /// SHA-256 of the canonical JSON form of the resolved configuration.
    pub config_sha256: String,
    pub config: RunConfig,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub status: RunStatus,
    pub error: Option<String>,
    pub outputs: Vec<OutputEntry>,
    /// Mode-specific counts and diagnostics.
    pub summary: serde_json::Map<String, serde_json::Value>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn config_hash(cfg: &RunConfig) -> String {
    let canonical = serde_json::to_vec(cfg).expect("config serializes");
    sha256_hex(&canonical)
}

/// Single owner of the output directory: every file goes through here and
/// is recorded for the manifest.
pub struct OutputSink {
    dir: PathBuf,
    entries: Vec<OutputEntry>,
    pub summary: serde_json::Map<String, serde_json::Value>,
}

impl OutputSink {
    /// The directory is created on the first write, so runs rejected while
    /// building the problem leave nothing behind.
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        Ok(Self { dir: dir.to_path_buf(), entries: Vec::new(), summary: Default::default() })
    }

    fn ensure_dir(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.dir)
            .map_err(|e| CliError::Output(format!("cannot create {}: {e}", self.dir.display())))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn record(&mut self, file: &str, kind: &str, schema: &str, rows: usize, bytes: &[u8]) -> Result<(), CliError> {
        self.ensure_dir()?;
        let path = self.dir.join(file);
        fs::write(&path, bytes).map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))?;
        self.entries.push(OutputEntry {
            file: file.into(),
            kind: kind.into(),
            schema: schema.into(),
            rows,
            sha256: sha256_hex(bytes),
            partial: false,
        });
        Ok(())
    }

    pub fn csv(&mut self, file: &str, schema: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(header).map_err(err)?;
        for r in rows {
            debug_assert_eq!(r.len(), header.len());
            w.write_record(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
        self.record(file, "csv", schema, rows.len(), &bytes)
    }

    pub fn json<T: Serialize>(&mut self, file: &str, schema: &str, value: &T) -> Result<(), CliError> {
        let v = serde_json::to_value(value).map_err(|e| CliError::Output(e.to_string()))?;
        let rows = match &v {
            serde_json::Value::Array(a) => a.len(),
            serde_json::Value::Object(o) => o.len(),
            _ => 1,
        };
        let mut bytes = serde_json::to_vec_pretty(&v).map_err(|e| CliError::Output(e.to_string()))?;
        bytes.push(b'\n');
        self.record(file, "json", schema, rows, &bytes)
    }

    pub fn text(&mut self, file: &str, kind: &str, schema: &str, rows: usize, body: &str) -> Result<(), CliError> {
        self.record(file, kind, schema, rows, body.as_bytes())
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(key.into(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
    }

    /// Writes the manifest; on failure every output already written is
    /// flagged partial.
    pub fn finish(mut self, mode: Mode, cfg: &RunConfig, failure: Option<&CliError>) -> Result<Manifest, CliError> {
        if failure.is_some() {
            for e in &mut self.entries {
                e.partial = true;
            }
        }
        let manifest = Manifest {
            schema: MANIFEST_SCHEMA.into(),
            tool: "adw".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            mode,
            config_sha256: config_hash(cfg),
            config: cfg.clone(),
            tolerances: cfg.tolerances,
            seed: cfg.seed,
            status: if failure.is_some() { RunStatus::NumericalFailure } else { RunStatus::Ok },
            error: failure.map(|e| e.to_string()),
            outputs: self.entries,
            summary: self.summary,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Output(e.to_string()))?;
        bytes.push(b'\n');
        fs::create_dir_all(&self.dir)
            .map_err(|e| CliError::Output(format!("cannot create {}: {e}", self.dir.display())))?;
        let path = self.dir.join(MANIFEST_FILE);
        fs::write(&path, bytes).map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))?;
        Ok(manifest)
    }
}

/// A CSV file read back as a header plus string records.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Output(e.to_string()))?;
        let header = r.headers().map_err(|e| CliError::Output(e.to_string()))?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|r| r.iter().map(String::from).collect()))
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Output(e.to_string()))?;
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Parses column `name` as `f64`.
    pub fn floats(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let c = self.column(name).ok_or_else(|| CliError::Output(format!("no column `{name}`")))?;
        self.rows
            .iter()
            .map(|r| r[c].parse::<f64>().map_err(|e| CliError::Output(format!("column {name}: {e}"))))
            .collect()
    }
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, CliError> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE)).map_err(|e| CliError::Output(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| CliError::Output(e.to_string()))
}
