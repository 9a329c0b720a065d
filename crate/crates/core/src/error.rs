//! Error type shared by all library operations.

use thiserror::Error;

/// Errors produced by risk, bound, test, margin, and simulation operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input that must contain at least one element was empty.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// A value fell outside its required closed interval. For vector
    /// inputs `index` identifies the offending element.
    #[error("{what}{} = {value} outside [{lo}, {hi}]",
            index.map(|i| format!("[{i}]")).unwrap_or_default())]
    OutOfRange {
        what: &'static str,
        index: Option<usize>,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// A scalar parameter violated its domain (wrong sign, wrong open
    /// interval, zero where a positive count is required, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The request is structurally valid but has no solution in range.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Interpretations were requested for a report that was not flagged.
    #[error("report is not flagged; interpretations apply only to flagged reports")]
    NotFlagged,

    /// Run-set records do not share common training/holdout lengths.
    #[error("ragged runs: run {index} has {axis} length {got}, expected {expected}")]
    RaggedRuns {
        index: usize,
        axis: &'static str,
        expected: usize,
        got: usize,
    },

    /// Two paired sequences differ in length.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

impl Error {
    pub(crate) fn out_of_range(what: &'static str, value: f64, lo: f64, hi: f64) -> Self {
        Error::OutOfRange {
            what,
            index: None,
            value,
            lo,
            hi,
        }
    }

    pub(crate) fn out_of_range_at(
        what: &'static str,
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    ) -> Self {
        Error::OutOfRange {
            what,
            index: Some(index),
            value,
            lo,
            hi,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
