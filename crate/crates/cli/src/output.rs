//! Deterministic table emission.  CSVs carry a header row and print floats
//! with 17 significant digits so a double round-trips losslessly and a given
//! config reproduces byte-identical files.  The JSON mirror carries the same
//! field names.  Every written file lands in the run manifest with its
//! SHA-256 checksum.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::Value::from(*v),
            Cell::Float(v) => serde_json::Value::from(*v),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

/// 17 significant digits; enough for an exact f64 round-trip.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A named table of homogeneous rows.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, headers: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.headers.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (h, cell) in self.headers.iter().zip(row) {
                    obj.insert(h.clone(), cell.json());
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("table serialization")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
    pub rows: usize,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    created_utc: String,
    scenario: &'a str,
    config: serde_json::Value,
    outputs: &'a [FileRecord],
}

/// Collects the tables of one run under `dir`, then seals the run with a
/// manifest listing every file and its checksum.
pub struct RunSink {
    dir: PathBuf,
    format: Format,
    files: Vec<FileRecord>,
}

impl RunSink {
    pub fn create(dir: &Path, format: Format) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(RunSink {
            dir: dir.to_path_buf(),
            format,
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write_table(&mut self, table: &Table) -> Result<(), CliError> {
        let body = match self.format {
            Format::Csv => table.to_csv(),
            Format::Json => table.to_json(),
        };
        let filename = format!("{}.{}", table.name, self.format.extension());
        let path = self.dir.join(&filename);
        fs::write(&path, body.as_bytes())?;
        self.files.push(FileRecord {
            path: filename,
            sha256: sha256_hex(body.as_bytes()),
            rows: table.rows.len(),
        });
        Ok(())
    }

    /// Write `manifest.json` and hand back the file records.
    pub fn finish(
        self,
        scenario: &str,
        config: &impl Serialize,
    ) -> Result<Vec<FileRecord>, CliError> {
        let manifest = Manifest {
            tool: "qlga",
            version: env!("CARGO_PKG_VERSION"),
            created_utc: chrono::Utc::now().to_rfc3339(),
            scenario,
            config: serde_json::to_value(config)
                .map_err(|e| CliError::Io(format!("manifest encoding: {e}")))?,
            outputs: &self.files,
        };
        let body = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Io(format!("manifest encoding: {e}")))?;
        fs::write(self.dir.join("manifest.json"), body.as_bytes())?;
        Ok(self.files)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
