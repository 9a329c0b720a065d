//! Cost vectors, empirical risk, and overfitting margins.
//!
//! A cost vector holds one already-evaluated per-sample cost in `[0, 1]`
//! per data point. Empirical risk is the arithmetic mean of those costs;
//! the overfitting margins are absolute gaps between two risks (empirical
//! vs. empirical, or empirical vs. a true expectation supplied by an
//! oracle).

use crate::error::{Error, Result};

/// A non-empty sequence of per-sample costs, each in `[0, 1]`.
///
/// Validation happens once at construction; out-of-range values are a hard
/// error rather than being clipped. Callers with float noise from upstream
/// (e.g. `1.0000000001`) must opt in via [`clip`] first.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector {
    values: Vec<f64>,
}

impl CostVector {
    /// Builds a cost vector, rejecting empty input and any element outside
    /// the closed interval `[0, 1]` (reported with its index).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("cost vector"));
        }
        for (i, &v) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::out_of_range_at("cost", i, v, 0.0, 1.0));
            }
        }
        Ok(CostVector { values })
    }

    /// Constant vector `[value; len]`.
    pub fn constant(value: f64, len: usize) -> Result<Self> {
        Self::new(vec![value; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }
}

/// Training and holdout risks of one fixed model, with sample sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskSummary {
    pub train_risk: f64,
    pub holdout_risk: f64,
    pub train_size: usize,
    pub holdout_size: usize,
}

/// Neumaier-compensated sum: the result equals the exact sum up to one
/// final rounding, independent of element order.
fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

/// Mean per-sample cost: `(1/m) * sum of costs`.
///
/// Uses compensated accumulation so the result is reproducible to well
/// below 1e-12 across element orderings.
pub fn empirical_risk(costs: &CostVector) -> f64 {
    let mean = compensated_sum(costs.values()) / costs.len() as f64;
    mean.clamp(0.0, 1.0)
}

/// Absolute gap between training and holdout empirical risk for the same
/// fixed model: `|e_train - e_holdout|`.
///
/// Both vectors must have been evaluated under one model that was fixed
/// before the holdout was drawn; the library cannot verify that contract.
pub fn empirical_overfitting_margin(train: &CostVector, holdout: &CostVector) -> f64 {
    (empirical_risk(train) - empirical_risk(holdout)).abs()
}

/// Absolute gap between training empirical risk and the model's true
/// expected cost: `|e_train - E|`.
///
/// The expectation comes from an oracle (for synthetic experiments, the
/// simulation module computes it exactly).
pub fn true_overfitting_margin(train: &CostVector, true_expectation: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&true_expectation) {
        return Err(Error::out_of_range(
            "true_expectation",
            true_expectation,
            0.0,
            1.0,
        ));
    }
    Ok((empirical_risk(train) - true_expectation).abs())
}

/// Clamps every value into `[lo, hi]`. Explicit opt-in preprocessing for
/// callers whose costs carry float noise; nothing in this crate clips
/// silently.
pub fn clip(values: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!(
            "clip range must be finite with lo < hi, got [{lo}, {hi}]"
        )));
    }
    Ok(values
        .iter()
        .map(|&v| if v.is_nan() { v } else { v.clamp(lo, hi) })
        .collect())
}
