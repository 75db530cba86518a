//! CSV and report emission. All numbers are written as {:.16e} (17
//! significant digits) so artifacts are bit-reproducible across runs.

use std::path::{Path, PathBuf};

use crate::CliError;

pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Build a CSV from a header and rows of already-formatted cells.
pub struct Csv {
    name: &'static str,
    lines: Vec<String>,
}

impl Csv {
    pub fn new(name: &'static str, header: &[&str]) -> Self {
        Csv {
            name,
            lines: vec![header.join(",")],
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.lines.push(cells.join(","));
    }

    pub fn number_row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&v| fmt(v)).collect();
        self.row(&cells);
    }

    pub fn write(self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join(self.name);
        let mut text = self.lines.join("\n");
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

/// Key-value report block printed to stdout; keys are emitted in insertion
/// order so runs read chronologically.
#[derive(Default)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn push(&mut self, key: &str, value: impl Into<String>) {
        self.lines.push((key.to_string(), value.into()));
    }

    pub fn push_f64(&mut self, key: &str, value: f64) {
        self.push(key, fmt(value));
    }

    pub fn print(&self) {
        let width = self.lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.lines {
            println!("{k:width$}  {v}");
        }
    }
}

/// Header of an existing CSV, for plot-script validation.
pub fn csv_header(path: &Path) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let first = text
        .lines()
        .next()
        .ok_or_else(|| CliError::Config(format!("{} is empty", path.display())))?;
    Ok(first.split(',').map(|s| s.trim().to_string()).collect())
}

/// Column index lookup that names the missing column and the file.
pub fn require_column(path: &Path, header: &[String], name: &str) -> Result<usize, CliError> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| {
            CliError::Config(format!(
                "{}: missing column {name:?} (header has: {})",
                path.display(),
                header.join(", ")
            ))
        })
}
