//! Run-set files: one JSON object per line with `train_costs` and
//! `holdout_costs` arrays, all records dimensionally consistent.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use genbound::{CostVector, MarginRun, MarginRunSet};

use crate::CliError;

#[derive(Debug, Deserialize)]
struct RunRecord {
    train_costs: Vec<f64>,
    holdout_costs: Vec<f64>,
}

pub fn parse_str(content: &str, path: &str) -> Result<MarginRunSet, CliError> {
    let mut runs = Vec::new();
    let mut line_numbers = Vec::new();
    for (i, raw_line) in content.split('\n').enumerate() {
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line).trim();
        if line.is_empty() {
            continue;
        }
        let record: RunRecord = serde_json::from_str(line).map_err(|e| {
            CliError::Input(format!("{path}:{}: malformed run record: {e}", i + 1))
        })?;
        let train = CostVector::new(record.train_costs)
            .map_err(|e| CliError::Input(format!("{path}:{}: train_costs: {e}", i + 1)))?;
        let holdout = CostVector::new(record.holdout_costs)
            .map_err(|e| CliError::Input(format!("{path}:{}: holdout_costs: {e}", i + 1)))?;
        runs.push(MarginRun { train, holdout });
        line_numbers.push(i + 1);
    }
    if runs.is_empty() {
        return Err(CliError::Input(format!("{path}: no run records found")));
    }

    // Report every dimensionally inconsistent record, not just the first.
    let m = runs[0].train.len();
    let m_prime = runs[0].holdout.len();
    let mut complaints = Vec::new();
    for (run, &line) in runs.iter().zip(&line_numbers) {
        if run.train.len() != m {
            complaints.push(format!(
                "{path}:{line}: train_costs has {} values, expected {m}",
                run.train.len()
            ));
        }
        if run.holdout.len() != m_prime {
            complaints.push(format!(
                "{path}:{line}: holdout_costs has {} values, expected {m_prime}",
                run.holdout.len()
            ));
        }
    }
    if !complaints.is_empty() {
        return Err(CliError::Input(complaints.join("\n")));
    }

    MarginRunSet::new(runs).map_err(CliError::from)
}

pub fn parse(path: &Path) -> Result<MarginRunSet, CliError> {
    let content = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_str(&content, &path.display().to_string())
}
