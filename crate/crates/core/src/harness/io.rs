use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::model::DataMatrix;

/// Reads a rectangular numeric CSV. A first line in which no cell parses as
/// a number is taken as a header and skipped.
pub fn load_matrix(path: &Path, expected_cols: Option<usize>) -> Result<DataMatrix, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_matrix(&text, expected_cols).map_err(|msg| HarnessError::Matrix { path: path.to_path_buf(), msg })
}

pub(crate) fn parse_matrix(text: &str, expected_cols: Option<usize>) -> Result<DataMatrix, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut cols: Option<usize> = expected_cols;
    let mut rows = 0;
    for (line, record) in reader.records().enumerate() {
        let row = line + 1;
        let record = record.map_err(|e| format!("row {row}: {e}"))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if line == 0 && record.iter().all(|c| c.parse::<f64>().is_err()) {
            continue;
        }
        match cols {
            Some(c) if c != record.len() => {
                return Err(format!("row {row}: expected {c} columns, found {}", record.len()));
            }
            None => cols = Some(record.len()),
            _ => {}
        }
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| format!("row {row}, column {}: {cell:?} is not a number", col + 1))?;
            if !v.is_finite() {
                return Err(format!("row {row}, column {}: non-finite value", col + 1));
            }
            values.push(v);
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    DataMatrix::from_row_major(rows, cols, values).map_err(|e| e.to_string())
}

/// CSV text with 17 significant digits, so reloading is bit-exact.
pub fn matrix_to_csv(m: &DataMatrix) -> String {
    let mut out = String::with_capacity(m.nrows() * m.ncols() * 24);
    for row in m.rows_iter() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{v:.16e}"));
        }
        out.push('\n');
    }
    out
}

pub fn save_matrix(path: &Path, m: &DataMatrix) -> Result<(), HarnessError> {
    fs::write(path, matrix_to_csv(m)).map_err(|e| HarnessError::io(path, e))
}

pub fn load_config(path: &Path, fallback: Option<super::Experiment>) -> Result<super::ExperimentConfig, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    super::ExperimentConfig::from_json(&text, fallback)
}

pub fn save_report(path: &Path, report: &super::ExperimentReport) -> Result<(), HarnessError> {
    fs::write(path, to_json_text(report)?).map_err(|e| HarnessError::io(path, e))
}

fn to_json_text<T: Serialize + ?Sized>(value: &T) -> Result<String, HarnessError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Writes artifacts under one directory and records them for the manifest.
#[derive(Debug)]
pub struct ArtifactWriter {
    root: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl ArtifactWriter {
    pub fn new(root: &Path) -> Result<Self, HarnessError> {
        fs::create_dir_all(root).map_err(|e| HarnessError::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), entries: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Paths written so far.
    pub fn paths(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.path.clone()).collect()
    }

    /// Writes `contents` to `name` (relative, `/`-separated) and returns
    /// the name for cross-referencing in reports.
    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<String, HarnessError> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
        }
        fs::write(&path, contents).map_err(|e| HarnessError::io(&path, e))?;
        self.entries.retain(|e| e.path != name);
        self.entries.push(ManifestEntry {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(contents)),
            bytes: contents.len() as u64,
        });
        Ok(name.to_string())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<String, HarnessError> {
        let text = to_json_text(value)?;
        self.write(name, text.as_bytes())
    }

    pub fn write_matrix(&mut self, name: &str, m: &DataMatrix) -> Result<String, HarnessError> {
        self.write(name, matrix_to_csv(m).as_bytes())
    }

    /// Writes a file that is deliberately left out of the manifest.
    pub fn write_unlisted(&self, name: &str, contents: &[u8]) -> Result<(), HarnessError> {
        let path = self.root.join(name);
        fs::write(&path, contents).map_err(|e| HarnessError::io(&path, e))
    }

    /// Writes `manifest.json` listing every artifact, sorted by path.
    pub fn finish(mut self) -> Result<Vec<ManifestEntry>, HarnessError> {
        self.entries.sort_by(|a, b| a.path.cmp(&b.path));
        let text = to_json_text(&serde_json::json!({ "files": &self.entries }))?;
        let path = self.root.join(MANIFEST_FILE);
        fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
        Ok(self.entries)
    }
}
