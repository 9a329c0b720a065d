//! Cost files: one decimal literal per line.
//!
//! Blank lines and lines starting with `#` are ignored; a trailing CR is
//! stripped so CRLF files parse. Values are written with 17 significant
//! digits, which round-trips every f64 exactly.

use std::fs;
use std::path::Path;

use crate::CliError;

/// Parsed cost file: values plus the 1-based line each value came from,
/// so range errors can point back at the offending line.
#[derive(Debug, Clone, PartialEq)]
pub struct CostFile {
    pub values: Vec<f64>,
    pub lines: Vec<usize>,
}

impl CostFile {
    /// Line number for the value at `index`.
    pub fn line_of(&self, index: usize) -> usize {
        self.lines.get(index).copied().unwrap_or(0)
    }
}

pub fn parse_str(content: &str, path: &str) -> Result<CostFile, CliError> {
    let mut values = Vec::new();
    let mut lines = Vec::new();
    for (i, raw_line) in content.split('\n').enumerate() {
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line).trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value: f64 = line.parse().map_err(|_| {
            CliError::Input(format!(
                "{path}:{}: could not parse {line:?} as a number",
                i + 1
            ))
        })?;
        values.push(value);
        lines.push(i + 1);
    }
    if values.is_empty() {
        return Err(CliError::Input(format!("{path}: no cost values found")));
    }
    Ok(CostFile { values, lines })
}

pub fn parse(path: &Path) -> Result<CostFile, CliError> {
    let content = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_str(&content, &path.display().to_string())
}

pub fn format_values(values: &[f64]) -> String {
    let mut out = String::new();
    for v in values {
        out.push_str(&format!("{v:.16e}\n"));
    }
    out
}

pub fn write(path: &Path, values: &[f64]) -> Result<(), CliError> {
    fs::write(path, format_values(values))
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
