//! The train-vs-holdout overfitting test.
//!
//! Null hypothesis: the fixed model eps/2-generalizes, i.e. its training
//! empirical risk sits within eps/2 of its true expected risk. Under that
//! null (and an iid holdout), the train/holdout gap exceeds `eps` with
//! probability at most `2*exp(-eps^2*m'/2)`. A gap above `eps` therefore
//! flags the run, and the report always carries all three readings of the
//! flag: an unlucky holdout draw, a generalization failure, or a holdout
//! that was not drawn from the training distribution. The test cannot
//! tell these apart.

use crate::bounds::{is_vacuous, overfit_test_bound};
use crate::error::{Error, Result};
use crate::risk::{empirical_risk, CostVector, RiskSummary};

/// Test parameters.
///
/// `significance_alpha` is an extension over the raw probability bound:
/// when set, the null is rejected only if the run is flagged AND the
/// bound is at most alpha. `probe_range` declares that the inputs are
/// bounded probe values in `[lo, hi]` rather than costs; they are
/// affinely rescaled to `[0, 1]` before risks are computed. The declared
/// range is trusted, never inferred from data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestConfig {
    pub epsilon: f64,
    pub significance_alpha: Option<f64>,
    pub probe_range: Option<(f64, f64)>,
}

impl TestConfig {
    pub fn new(epsilon: f64) -> Self {
        TestConfig {
            epsilon,
            significance_alpha: None,
            probe_range: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && 0.0 < self.epsilon && self.epsilon < 1.0) {
            return Err(Error::Domain(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if let Some(alpha) = self.significance_alpha {
            if !(alpha.is_finite() && 0.0 < alpha && alpha < 1.0) {
                return Err(Error::Domain(format!(
                    "alpha must lie in (0, 1), got {alpha}"
                )));
            }
        }
        if let Some((lo, hi)) = self.probe_range {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Domain(format!(
                    "probe range must be finite with lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of the hypothesis test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    NullRetained,
    NullRejected,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::NullRetained => "null_retained",
            Decision::NullRejected => "null_rejected",
        }
    }
}

/// The three readings of a flagged run, in fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpretationKind {
    /// All hypotheses hold and the holdout draw itself was unlikely.
    UnluckySample,
    /// The model does not generalize the training distribution under
    /// this cost: the eps/2-generalization null fails.
    Overfitting,
    /// The holdout was not drawn iid from the training distribution.
    DistributionShift,
}

impl InterpretationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InterpretationKind::UnluckySample => "unlucky_sample",
            InterpretationKind::Overfitting => "overfitting",
            InterpretationKind::DistributionShift => "distribution_shift",
        }
    }
}

/// One reading of the flag with explanatory text.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpretation {
    pub kind: InterpretationKind,
    pub detail: String,
}

/// Full outcome of one test run.
#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub risk_summary: RiskSummary,
    /// `|signed_gap|`, the empirical overfitting margin.
    pub margin: f64,
    /// `holdout_risk - train_risk`; positive is the overfitting direction.
    pub signed_gap: f64,
    pub epsilon: f64,
    /// Precision of the null being tested, `epsilon / 2`.
    pub null_precision: f64,
    /// `2*exp(-eps^2*m'/2)`, raw (may exceed 1).
    pub bound: f64,
    pub vacuous: bool,
    /// True iff `margin > epsilon` (ties do not flag).
    pub flagged: bool,
    pub decision: Decision,
    /// Populated exactly when flagged; always all three, in fixed order.
    pub interpretations: Vec<Interpretation>,
}

fn rescale(costs: &[f64], range: Option<(f64, f64)>, what: &'static str) -> Result<CostVector> {
    match range {
        None => CostVector::new(costs.to_vec()).map_err(|e| rename_cost_error(e, what)),
        Some((lo, hi)) => {
            let width = hi - lo;
            let mut scaled = Vec::with_capacity(costs.len());
            for (i, &v) in costs.iter().enumerate() {
                if !(lo..=hi).contains(&v) {
                    return Err(Error::out_of_range_at(what, i, v, lo, hi));
                }
                scaled.push((v - lo) / width);
            }
            CostVector::new(scaled).map_err(|e| rename_cost_error(e, what))
        }
    }
}

fn rename_cost_error(e: Error, what: &'static str) -> Error {
    match e {
        Error::EmptyInput(_) => Error::EmptyInput(what),
        Error::OutOfRange {
            index, value, lo, hi, ..
        } => Error::OutOfRange {
            what,
            index,
            value,
            lo,
            hi,
        },
        other => other,
    }
}

fn build_interpretations(epsilon: f64, bound: f64, vacuous: bool) -> Vec<Interpretation> {
    let probability_note = if vacuous {
        format!(
            "probability bound {bound:.6e} exceeds 1 and is vacuous; \
             the holdout is too small to make this event rare"
        )
    } else {
        format!("probability <= {bound:.6e} under the test's hypotheses")
    };
    vec![
        Interpretation {
            kind: InterpretationKind::UnluckySample,
            detail: format!(
                "an unlikely holdout sample was drawn while every hypothesis holds ({probability_note})"
            ),
        },
        Interpretation {
            kind: InterpretationKind::Overfitting,
            detail: format!(
                "the model does not generalize under this cost: its training risk is not \
                 within {:.6} (= epsilon/2) of its expected risk (overfitting)",
                epsilon / 2.0
            ),
        },
        Interpretation {
            kind: InterpretationKind::DistributionShift,
            detail: "the holdout set was not drawn iid from the training distribution \
                     (possible distribution shift)"
                .to_string(),
        },
    ]
}

/// Runs the test on one model's training and holdout cost vectors.
///
/// The inputs must come from the same model, fixed before the holdout was
/// drawn. Returns the full report; the gap, flag, and decision are
/// deterministic functions of the inputs.
pub fn run_test(train: &[f64], holdout: &[f64], config: &TestConfig) -> Result<TestReport> {
    config.validate()?;
    let train = rescale(train, config.probe_range, "train cost")?;
    let holdout = rescale(holdout, config.probe_range, "holdout cost")?;

    let train_risk = empirical_risk(&train);
    let holdout_risk = empirical_risk(&holdout);
    let signed_gap = holdout_risk - train_risk;
    let margin = signed_gap.abs();

    let bound = overfit_test_bound(config.epsilon, holdout.len())?;
    let vacuous = is_vacuous(bound);
    let flagged = margin > config.epsilon;
    let decision = match (flagged, config.significance_alpha) {
        (false, _) => Decision::NullRetained,
        (true, None) => Decision::NullRejected,
        (true, Some(alpha)) => {
            if bound <= alpha {
                Decision::NullRejected
            } else {
                Decision::NullRetained
            }
        }
    };
    let interpretations = if flagged {
        build_interpretations(config.epsilon, bound, vacuous)
    } else {
        Vec::new()
    };

    Ok(TestReport {
        risk_summary: RiskSummary {
            train_risk,
            holdout_risk,
            train_size: train.len(),
            holdout_size: holdout.len(),
        },
        margin,
        signed_gap,
        epsilon: config.epsilon,
        null_precision: config.epsilon / 2.0,
        bound,
        vacuous,
        flagged,
        decision,
        interpretations,
    })
}

/// The three readings of a flagged report, in fixed order. Errors with
/// [`Error::NotFlagged`] on an unflagged report.
pub fn interpret_flag(report: &TestReport) -> Result<Vec<Interpretation>> {
    if !report.flagged {
        return Err(Error::NotFlagged);
    }
    Ok(build_interpretations(
        report.epsilon,
        report.bound,
        report.vacuous,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_constant_inputs_do_not_flag() {
        let train = vec![0.1; 100];
        let holdout = vec![0.1; 400];
        let report = run_test(&train, &holdout, &TestConfig::new(0.05)).unwrap();
        assert_eq!(report.margin, 0.0);
        assert!(!report.flagged);
        assert_eq!(report.decision, Decision::NullRetained);
        // 2*exp(-0.0025*400/2) = 2*exp(-0.5)
        assert!((report.bound - 2.0 * (-0.5f64).exp()).abs() < 1e-15);
        assert!((report.bound - 1.213).abs() < 5e-4);
        assert!(report.vacuous);
        assert!(report.interpretations.is_empty());
    }

    #[test]
    fn memorizer_scenario_rejects_null() {
        // Zero training cost, holdout mean 0.30 at m' = 2000.
        let train = vec![0.0; 100];
        let mut holdout = vec![1.0; 600];
        holdout.extend(vec![0.0; 1400]);
        let report = run_test(&train, &holdout, &TestConfig::new(0.2)).unwrap();
        assert!((report.margin - 0.30).abs() < 1e-12);
        assert!(report.flagged);
        assert_eq!(report.decision, Decision::NullRejected);
        // 2*exp(-0.04*2000/2) = 2*exp(-40)
        assert!((report.bound - 2.0 * (-40.0f64).exp()).abs() < 1e-25);
        assert!((report.bound - 8.5e-18).abs() < 5e-20);
        assert_eq!(report.interpretations.len(), 3);
        assert!(report.signed_gap > 0.0);
    }

    #[test]
    fn small_gap_retains_null() {
        let train = vec![0.2; 50];
        let holdout = vec![0.25; 1000];
        let report = run_test(&train, &holdout, &TestConfig::new(0.1)).unwrap();
        assert!((report.margin - 0.05).abs() < 1e-12);
        assert!(!report.flagged);
        assert_eq!(report.decision, Decision::NullRetained);
    }

    #[test]
    fn tie_with_epsilon_does_not_flag() {
        let train = vec![0.0; 10];
        let holdout = vec![0.5; 10];
        let report = run_test(&train, &holdout, &TestConfig::new(0.5)).unwrap();
        assert_eq!(report.margin, 0.5);
        assert!(!report.flagged);
    }

    #[test]
    fn alpha_gates_the_decision() {
        let train = vec![0.0; 10];
        let holdout = vec![1.0; 10];
        // Flagged either way; bound = 2*exp(-0.125) ~ 1.765 (vacuous).
        let mut config = TestConfig::new(0.5);
        config.significance_alpha = Some(0.05);
        let report = run_test(&train, &holdout, &config).unwrap();
        assert!(report.flagged);
        assert_eq!(report.decision, Decision::NullRetained);

        // With a large holdout the bound beats alpha and the flag converts.
        let holdout = vec![1.0; 2000];
        let report = run_test(&train, &holdout, &config).unwrap();
        assert!(report.flagged);
        assert!(report.bound <= 0.05);
        assert_eq!(report.decision, Decision::NullRejected);
    }

    #[test]
    fn interpret_flag_requires_flagged_report() {
        let report = run_test(&[0.1; 10], &[0.1; 10], &TestConfig::new(0.1)).unwrap();
        assert_eq!(interpret_flag(&report).unwrap_err(), Error::NotFlagged);
    }

    #[test]
    fn interpret_flag_carries_bound_annotation() {
        let train = vec![0.0; 100];
        let mut holdout = vec![1.0; 600];
        holdout.extend(vec![0.0; 1400]);
        let report = run_test(&train, &holdout, &TestConfig::new(0.2)).unwrap();
        let records = interpret_flag(&report).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(records[0].kind, InterpretationKind::UnluckySample);
        assert_eq!(records[1].kind, InterpretationKind::Overfitting);
        assert_eq!(records[2].kind, InterpretationKind::DistributionShift);
        assert!(records[0].detail.contains("e-18"), "{}", records[0].detail);
        assert_eq!(records, report.interpretations);
    }

    #[test]
    fn vacuous_bound_is_annotated() {
        let report = run_test(&[0.0; 4], &[1.0; 4], &TestConfig::new(0.5)).unwrap();
        assert!(report.flagged);
        assert!(report.vacuous);
        assert!(report.interpretations[0].detail.contains("vacuous"));
    }

    #[test]
    fn probe_values_are_rescaled() {
        // Probe values in [-2, 2]; margin must match the [0, 1] view.
        let mut config = TestConfig::new(0.1);
        config.probe_range = Some((-2.0, 2.0));
        let report = run_test(&[-2.0, -2.0], &[2.0, 2.0], &config).unwrap();
        assert!((report.margin - 1.0).abs() < 1e-15);
        assert!(report.flagged);
    }

    #[test]
    fn probe_out_of_declared_range_errors() {
        let mut config = TestConfig::new(0.1);
        config.probe_range = Some((0.0, 10.0));
        let err = run_test(&[5.0, 11.0], &[5.0], &config).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { index: Some(1), .. }));
    }

    #[test]
    fn raw_cost_out_of_unit_range_errors() {
        let err = run_test(&[0.5, 1.5], &[0.5], &TestConfig::new(0.1)).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { index: Some(1), .. }));
    }

    #[test]
    fn bad_config_errors() {
        assert!(run_test(&[0.1], &[0.1], &TestConfig::new(0.0)).is_err());
        assert!(run_test(&[0.1], &[0.1], &TestConfig::new(1.0)).is_err());
        let mut config = TestConfig::new(0.1);
        config.significance_alpha = Some(1.5);
        assert!(run_test(&[0.1], &[0.1], &config).is_err());
        let mut config = TestConfig::new(0.1);
        config.probe_range = Some((3.0, 3.0));
        assert!(run_test(&[3.0], &[3.0], &config).is_err());
    }

    #[test]
    fn report_is_deterministic() {
        let train = vec![0.12, 0.5, 0.33];
        let holdout = vec![0.9, 0.1, 0.4, 0.7];
        let a = run_test(&train, &holdout, &TestConfig::new(0.2)).unwrap();
        let b = run_test(&train, &holdout, &TestConfig::new(0.2)).unwrap();
        assert_eq!(a, b);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn equal_multisets_never_flag(
                values in proptest::collection::vec(0.0..=1.0f64, 1..100),
                rotation in 0usize..100,
                eps in 0.001..0.999f64,
            ) {
                let mut holdout = values.clone();
                holdout.rotate_left(rotation % values.len());
                let report = run_test(&values, &holdout, &TestConfig::new(eps)).unwrap();
                prop_assert!(!report.flagged);
            }

            #[test]
            fn affine_rescaling_preserves_the_decision(
                train in proptest::collection::vec(0.0..=1.0f64, 1..60),
                holdout in proptest::collection::vec(0.0..=1.0f64, 1..60),
                eps in 0.01..0.9f64,
                scale in 0.1..10.0f64,
                shift in -5.0..5.0f64,
            ) {
                let mut unit = TestConfig::new(eps);
                unit.probe_range = Some((0.0, 1.0));
                let base = run_test(&train, &holdout, &unit).unwrap();

                let t: Vec<f64> = train.iter().map(|v| scale * v + shift).collect();
                let h: Vec<f64> = holdout.iter().map(|v| scale * v + shift).collect();
                let mut moved = TestConfig::new(eps);
                moved.probe_range = Some((shift, scale + shift));
                let transformed = run_test(&t, &h, &moved).unwrap();

                prop_assert!((base.margin - transformed.margin).abs() <= 1e-12);
                prop_assert_eq!(base.flagged, transformed.flagged);
                prop_assert_eq!(base.decision, transformed.decision);
            }

            #[test]
            fn flag_iff_margin_exceeds_epsilon(
                train in proptest::collection::vec(0.0..=1.0f64, 1..80),
                holdout in proptest::collection::vec(0.0..=1.0f64, 1..80),
                eps in 0.01..0.99f64,
            ) {
                let report = run_test(&train, &holdout, &TestConfig::new(eps)).unwrap();
                prop_assert_eq!(report.flagged, report.margin > eps);
                prop_assert!((report.margin - report.signed_gap.abs()).abs() < 1e-15);
                let expected = overfit_test_bound(eps, holdout.len()).unwrap();
                prop_assert_eq!(report.bound, expected);
                prop_assert_eq!(report.interpretations.len(), if report.flagged { 3 } else { 0 });
            }
        }
    }
}
