//! Deterministic artifact output: fixed-precision float text, a minimal CSV
//! table, and atomic file writes (temp file + rename) so a crashed run never
//! leaves a half-written artifact behind.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("malformed CSV: {0}")]
    Csv(String),
}

/// Render a float with 17 significant digits, enough for exact f64
/// round-trips. All artifact numbers go through here so identical runs
/// produce byte-identical files.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `bytes` to `path` atomically: the content lands in a temp file in
/// the same directory and is renamed over the target.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), OutputError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => Path::new(".").to_path_buf(),
    };
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "artifact".to_string());
    let tmp = dir.join(format!(".{name}.tmp.{}", std::process::id()));
    if let Err(e) = fs::write(&tmp, bytes) {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    if let Err(e) = fs::rename(&tmp, path) {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}

/// Numeric CSV table with a fixed header. Floats render via [`fmt_f64`];
/// `parse` reads the same dialect back, so every emitted table is
/// re-readable by the toolkit itself.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        CsvTable {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width does not match header"
        );
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                let _ = write!(out, "{}", fmt_f64(*v));
                first = false;
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, OutputError> {
        let mut lines = text.lines();
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| OutputError::Csv("empty input".into()))?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for (k, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Result<Vec<f64>, _> = line
                .split(',')
                .map(|tok| tok.trim().parse::<f64>())
                .collect();
            let row = row.map_err(|e| OutputError::Csv(format!("line {}: {e}", k + 2)))?;
            if row.len() != header.len() {
                return Err(OutputError::Csv(format!(
                    "line {}: {} fields, header has {}",
                    k + 2,
                    row.len(),
                    header.len()
                )));
            }
            rows.push(row);
        }
        Ok(CsvTable { header, rows })
    }

    pub fn write(&self, path: &Path) -> Result<(), OutputError> {
        atomic_write(path, self.render().as_bytes())
    }
}

/// Serialize `value` as pretty JSON (trailing newline) and write atomically.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), OutputError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| OutputError::Csv(format!("json serialization: {e}")))?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}
