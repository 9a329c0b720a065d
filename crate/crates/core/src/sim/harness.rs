//! Monte Carlo validation of the probability bounds.
//!
//! Every repetition follows the same protocol: draw training data, fit,
//! freeze the model, and only then draw the data the bounded event is
//! evaluated on. Trials run on counter-based substreams and aggregate by
//! integer counts (or index-ordered reduction), so results are identical
//! whatever the parallel schedule.

use rayon::prelude::*;

use super::{
    cost_vector, exact_expectation, fit_prefix, sample_dataset, substream, train, ModelSpec,
    SimulationSpec, LANE_CURVE, LANE_ORACLE, LANE_TRIAL,
};
use crate::bounds::{
    fixed_model_bound, margin_estimate_bound, min_holdout_size, overfit_test_bound, BoundKind,
};
use crate::error::{Error, Result};
use crate::risk::{empirical_overfitting_margin, empirical_risk, true_overfitting_margin};

/// Draws used by the brute-force mean-margin oracle inside
/// [`validate_bound`].
pub const MARGIN_ORACLE_DRAWS: usize = 100_000;

/// Outcome of one bound validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRecord {
    pub kind: BoundKind,
    pub epsilon: f64,
    /// Confidence parameter of the size hypothesis (margin-estimate kind
    /// only; echoed for the others).
    pub delta: f64,
    pub trials: usize,
    pub violations: usize,
    pub violation_frequency: f64,
    /// The closed-form bound on the violated event.
    pub bound: f64,
    /// Three-sigma Monte Carlo allowance on top of the bound.
    pub slack: f64,
    pub pass: bool,
    pub seed: u64,
    /// True mean margin used as the reference point (margin-estimate kind
    /// only).
    pub true_mean_margin: Option<f64>,
}

fn three_sigma_slack(bound: f64, trials: usize) -> f64 {
    3.0 * (bound * (1.0 - bound.min(1.0)) / trials as f64).sqrt()
}

/// Mean true overfitting margin `E |e_train - E(cost)|` for the family,
/// estimated by independent training draws scored against the exact
/// per-model expectation. This route never touches a holdout set, which
/// keeps it independent of the estimator it is used to check.
pub fn mean_margin_oracle(
    spec: &SimulationSpec,
    family: ModelSpec,
    draws: usize,
) -> Result<f64> {
    spec.validate()?;
    if draws == 0 {
        return Err(Error::Domain("oracle draws must be >= 1, got 0".into()));
    }
    let margins: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(spec.seed, LANE_ORACLE, i as u64);
            let sample = sample_dataset(&spec.joint, spec.m, &mut rng)?;
            let model = train(family, &sample)?;
            let expectation = exact_expectation(&model, &spec.joint);
            let costs = cost_vector(&model, &sample)?;
            true_overfitting_margin(&costs, expectation)
        })
        .collect::<Result<_>>()?;
    // Index order is fixed by the collect; the reduction below is serial.
    Ok(margins.iter().sum::<f64>() / draws as f64)
}

fn fixed_model_violation(spec: &SimulationSpec, epsilon: f64, trial: u64) -> Result<bool> {
    let mut rng = substream(spec.seed, LANE_TRIAL, trial);
    let sample = sample_dataset(&spec.joint, spec.m, &mut rng)?;
    let model = train(spec.model, &sample)?;
    let expectation = exact_expectation(&model, &spec.joint);
    // Model is now fixed; draw the data it is scored on.
    let holdout = sample_dataset(&spec.joint, spec.m_prime, &mut rng)?;
    let holdout_costs = cost_vector(&model, &holdout)?;
    Ok((empirical_risk(&holdout_costs) - expectation).abs() > epsilon)
}

fn overfit_test_violation(spec: &SimulationSpec, epsilon: f64, trial: u64) -> Result<bool> {
    let mut rng = substream(spec.seed, LANE_TRIAL, trial);
    let sample = sample_dataset(&spec.joint, spec.m, &mut rng)?;
    let model = train(spec.model, &sample)?;
    let train_costs = cost_vector(&model, &sample)?;
    let holdout = sample_dataset(&spec.joint, spec.m_prime, &mut rng)?;
    let holdout_costs = cost_vector(&model, &holdout)?;
    Ok(empirical_overfitting_margin(&train_costs, &holdout_costs) > epsilon)
}

fn margin_estimate_violation(
    spec: &SimulationSpec,
    epsilon: f64,
    true_mean_margin: f64,
    trial: u64,
) -> Result<bool> {
    let mut rng = substream(spec.seed, LANE_TRIAL, trial);
    let mut models = Vec::with_capacity(spec.k);
    let mut train_costs = Vec::with_capacity(spec.k);
    for _ in 0..spec.k {
        let sample = sample_dataset(&spec.joint, spec.m, &mut rng)?;
        let model = train(spec.model, &sample)?;
        train_costs.push(cost_vector(&model, &sample)?);
        models.push(model);
    }
    // One shared holdout, drawn after all k models are frozen.
    let holdout = sample_dataset(&spec.joint, spec.m_prime, &mut rng)?;
    let mut margin_sum = 0.0;
    for (model, train_cost) in models.iter().zip(&train_costs) {
        let holdout_costs = cost_vector(model, &holdout)?;
        margin_sum += empirical_overfitting_margin(train_cost, &holdout_costs);
    }
    let estimate = margin_sum / spec.k as f64;
    Ok((estimate - true_mean_margin).abs() > epsilon)
}

/// Runs `spec.trials` repetitions of the experiment behind `kind` and
/// compares the empirical frequency of the bounded event against the
/// closed-form bound plus a three-sigma Monte Carlo allowance.
///
/// `delta` parameterizes the margin-estimate size hypothesis
/// `m' > k + 2*ln(k/delta)/eps^2`; that kind is infeasible when the
/// spec's holdout is smaller. The other kinds ignore `delta`.
pub fn validate_bound(
    spec: &SimulationSpec,
    kind: BoundKind,
    epsilon: f64,
    delta: f64,
) -> Result<ValidationRecord> {
    spec.validate()?;

    let (bound, true_mean_margin) = match kind {
        BoundKind::FixedModel => (fixed_model_bound(epsilon, spec.m_prime)?, None),
        BoundKind::OverfitTest => (overfit_test_bound(epsilon, spec.m_prime)?, None),
        BoundKind::MarginEstimate => {
            let required = min_holdout_size(spec.k, epsilon, delta)?;
            if spec.m_prime < required {
                return Err(Error::Infeasible(format!(
                    "margin-estimate validation needs m_prime >= {required} \
                     (k = {}, epsilon = {epsilon}, delta = {delta}), got {}",
                    spec.k, spec.m_prime
                )));
            }
            let mu = mean_margin_oracle(spec, spec.model, MARGIN_ORACLE_DRAWS)?;
            (margin_estimate_bound(epsilon, spec.k)?, Some(mu))
        }
    };

    let violations: usize = (0..spec.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let violated = match kind {
                BoundKind::FixedModel => fixed_model_violation(spec, epsilon, trial),
                BoundKind::OverfitTest => overfit_test_violation(spec, epsilon, trial),
                BoundKind::MarginEstimate => margin_estimate_violation(
                    spec,
                    epsilon,
                    true_mean_margin.expect("oracle computed above"),
                    trial,
                ),
            };
            violated.map(usize::from)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;

    let violation_frequency = violations as f64 / spec.trials as f64;
    let slack = three_sigma_slack(bound, spec.trials);
    Ok(ValidationRecord {
        kind,
        epsilon,
        delta,
        trials: spec.trials,
        violations,
        violation_frequency,
        bound,
        slack,
        pass: violation_frequency <= bound + slack,
        seed: spec.seed,
        true_mean_margin,
    })
}

/// One row of the training curve.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Training points memorized at this epoch.
    pub memorized: usize,
    pub train_risk: f64,
    pub holdout_risk: f64,
    pub margin: f64,
    pub flagged: bool,
}

/// Risk trajectory of an incrementally grown model: epoch t fits the
/// first `t*m/epochs` training points and is scored on the full training
/// sample and on one fixed holdout. Returns `epochs + 1` records; epoch 0
/// fits nothing (for the memorizer family that is the all-zeros
/// predictor) and the final epoch fits the whole sample.
///
/// For the memorizer, the train risk column is nonincreasing whenever the
/// training sample has no repeated x; repeats can flip a majority label
/// mid-curve and locally raise it.
pub fn epoch_curve(spec: &SimulationSpec, epochs: usize, epsilon: f64) -> Result<Vec<EpochRecord>> {
    spec.validate()?;
    if epochs == 0 {
        return Err(Error::Domain("epochs must be >= 1, got 0".into()));
    }
    if !(epsilon.is_finite() && 0.0 < epsilon && epsilon < 1.0) {
        return Err(Error::Domain(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let mut rng = substream(spec.seed, LANE_CURVE, 0);
    let sample = sample_dataset(&spec.joint, spec.m, &mut rng)?;
    let holdout = sample_dataset(&spec.joint, spec.m_prime, &mut rng)?;

    let mut records = Vec::with_capacity(epochs + 1);
    for epoch in 0..=epochs {
        let memorized = epoch * spec.m / epochs;
        let model = fit_prefix(spec.model, &sample[..memorized]);
        let train_risk = empirical_risk(&cost_vector(&model, &sample)?);
        let holdout_risk = empirical_risk(&cost_vector(&model, &holdout)?);
        let margin = (train_risk - holdout_risk).abs();
        records.push(EpochRecord {
            epoch,
            memorized,
            train_risk,
            holdout_risk,
            margin,
            flagged: margin > epsilon,
        });
    }
    Ok(records)
}

/// Frequencies of the training-data margin `|e_train - E|` exceeding
/// `epsilon`, side by side for a sample-independent model and for the
/// memorizer, against the bound that applies only to the former.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConcentrationReport {
    pub epsilon: f64,
    pub trials: usize,
    /// `2*exp(-2*eps^2*m)`: valid for a model fixed before the training
    /// draw.
    pub bound: f64,
    /// Frequency for the parity oracle, which ignores the sample; the
    /// bound applies.
    pub parity_oracle_frequency: f64,
    /// Frequency for the memorizer, which is a function of the sample; no
    /// bound applies, and this column is expected to blow straight past it.
    pub memorizer_frequency: f64,
    pub seed: u64,
}

/// Scores models on their own training data to exhibit where
/// concentration does and does not apply.
pub fn training_concentration_report(
    spec: &SimulationSpec,
    epsilon: f64,
) -> Result<TrainingConcentrationReport> {
    spec.validate()?;
    let bound = fixed_model_bound(epsilon, spec.m)?;
    let frequency_for = |family: ModelSpec| -> Result<f64> {
        let violations: usize = (0..spec.trials as u64)
            .into_par_iter()
            .map(|trial| {
                let mut rng = substream(spec.seed, LANE_TRIAL, trial);
                let sample = sample_dataset(&spec.joint, spec.m, &mut rng)?;
                let model = train(family, &sample)?;
                let expectation = exact_expectation(&model, &spec.joint);
                let costs = cost_vector(&model, &sample)?;
                Ok(usize::from(
                    true_overfitting_margin(&costs, expectation)? > epsilon,
                ))
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        Ok(violations as f64 / spec.trials as f64)
    };
    Ok(TrainingConcentrationReport {
        epsilon,
        trials: spec.trials,
        bound,
        parity_oracle_frequency: frequency_for(ModelSpec::ParityOracle)?,
        memorizer_frequency: frequency_for(ModelSpec::Memorizer)?,
        seed: spec.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{DiscreteJoint, FittedModel};

    fn spec(
        joint: DiscreteJoint,
        model: ModelSpec,
        m: usize,
        m_prime: usize,
        k: usize,
        trials: usize,
        seed: u64,
    ) -> SimulationSpec {
        SimulationSpec {
            joint,
            model,
            m,
            m_prime,
            k,
            trials,
            seed,
        }
    }

    #[test]
    fn fixed_model_bound_holds_for_constant_zero() {
        let s = spec(
            DiscreteJoint::uniform(10, 0.0).unwrap(),
            ModelSpec::ConstantZero,
            10,
            200,
            1,
            10_000,
            20_240_101,
        );
        let record = validate_bound(&s, BoundKind::FixedModel, 0.1, 0.05).unwrap();
        assert!(record.pass, "{record:?}");
        assert!(record.violation_frequency <= record.bound + record.slack);
        // Expected far below the bound, not merely under it.
        assert!(record.violation_frequency < record.bound);
    }

    #[test]
    fn overfit_test_bound_holds_when_the_null_holds() {
        let s = spec(
            DiscreteJoint::uniform(10, 0.3).unwrap(),
            ModelSpec::ParityOracle,
            200,
            1000,
            1,
            10_000,
            7,
        );
        let record = validate_bound(&s, BoundKind::OverfitTest, 0.1, 0.05).unwrap();
        assert!(record.pass, "{record:?}");
    }

    #[test]
    fn margin_estimate_bound_holds_for_memorizer() {
        let s = spec(
            DiscreteJoint::uniform(10, 0.3).unwrap(),
            ModelSpec::Memorizer,
            30,
            400,
            10,
            500,
            99,
        );
        // min_holdout_size(10, 0.3, 0.05) = 10 + 2*ln(200)/0.09 ~ 128.
        let record = validate_bound(&s, BoundKind::MarginEstimate, 0.3, 0.05).unwrap();
        assert!(record.pass, "{record:?}");
        assert!(record.true_mean_margin.is_some());
    }

    #[test]
    fn margin_estimate_requires_large_enough_holdout() {
        let s = spec(
            DiscreteJoint::uniform(10, 0.3).unwrap(),
            ModelSpec::Memorizer,
            30,
            100,
            10,
            100,
            99,
        );
        assert!(matches!(
            validate_bound(&s, BoundKind::MarginEstimate, 0.3, 0.05),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn validation_is_deterministic() {
        let s = spec(
            DiscreteJoint::uniform(10, 0.2).unwrap(),
            ModelSpec::Memorizer,
            50,
            300,
            1,
            2_000,
            123_456,
        );
        let a = validate_bound(&s, BoundKind::OverfitTest, 0.15, 0.05).unwrap();
        let b = validate_bound(&s, BoundKind::OverfitTest, 0.15, 0.05).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oracle_is_deterministic_and_in_range() {
        let s = spec(
            DiscreteJoint::uniform(10, 0.3).unwrap(),
            ModelSpec::Memorizer,
            40,
            100,
            1,
            1,
            5,
        );
        let a = mean_margin_oracle(&s, ModelSpec::Memorizer, 20_000).unwrap();
        let b = mean_margin_oracle(&s, ModelSpec::Memorizer, 20_000).unwrap();
        assert_eq!(a, b);
        assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn epoch_curve_endpoints() {
        let joint = DiscreteJoint::uniform(10_000, 0.3).unwrap();
        let s = spec(joint, ModelSpec::Memorizer, 100, 2000, 1, 1, 2024);
        let epochs = 10;
        let curve = epoch_curve(&s, epochs, 0.2).unwrap();
        assert_eq!(curve.len(), epochs + 1);

        // Epoch 0 memorizes nothing and must match the constant-zero model.
        let mut rng = substream(2024, LANE_CURVE, 0);
        let sample = sample_dataset(&s.joint, s.m, &mut rng).unwrap();
        let holdout = sample_dataset(&s.joint, s.m_prime, &mut rng).unwrap();
        let zero = FittedModel::ConstantZero;
        assert_eq!(
            curve[0].train_risk,
            empirical_risk(&cost_vector(&zero, &sample).unwrap())
        );
        assert_eq!(
            curve[0].holdout_risk,
            empirical_risk(&cost_vector(&zero, &holdout).unwrap())
        );

        // The final epoch memorizes everything and must match the fully
        // trained memorizer on the same data.
        let full = train(ModelSpec::Memorizer, &sample).unwrap();
        assert_eq!(
            curve[epochs].train_risk,
            empirical_risk(&cost_vector(&full, &sample).unwrap())
        );
        assert_eq!(
            curve[epochs].holdout_risk,
            empirical_risk(&cost_vector(&full, &holdout).unwrap())
        );
        assert_eq!(curve[epochs].memorized, s.m);
    }

    #[test]
    fn epoch_curve_shows_margin_crossing() {
        // Duplicate-free with overwhelming probability: 100 draws from
        // 10^4 points; train risk then decays to zero while holdout risk
        // stays near 1/2, so the margin crosses epsilon.
        let joint = DiscreteJoint::uniform(10_000, 0.3).unwrap();
        let s = spec(joint, ModelSpec::Memorizer, 100, 2000, 1, 1, 77);
        let curve = epoch_curve(&s, 10, 0.2).unwrap();
        for pair in curve.windows(2) {
            assert!(
                pair[1].train_risk <= pair[0].train_risk + 1e-12,
                "train risk rose: {pair:?}"
            );
        }
        assert!(curve.last().unwrap().train_risk < 0.05);
        assert!(curve.iter().all(|r| r.holdout_risk >= 0.3));
        assert!(curve.iter().any(|r| r.flagged));
        assert!(!curve[0].flagged); // constant-zero baseline is close to fair
    }

    #[test]
    fn sample_independent_families_give_flat_curves() {
        let joint = DiscreteJoint::uniform(10, 0.1).unwrap();
        let s = spec(joint, ModelSpec::ParityOracle, 50, 100, 1, 1, 3);
        let curve = epoch_curve(&s, 5, 0.2).unwrap();
        for record in &curve {
            assert_eq!(record.train_risk, curve[0].train_risk);
            assert_eq!(record.holdout_risk, curve[0].holdout_risk);
        }
    }

    #[test]
    fn training_concentration_separates_the_families() {
        let s = spec(
            DiscreteJoint::uniform(100, 0.3).unwrap(),
            ModelSpec::Memorizer,
            200,
            1,
            1,
            5_000,
            11,
        );
        let report = training_concentration_report(&s, 0.1).unwrap();
        let slack = three_sigma_slack(report.bound, report.trials);
        // The oracle ignores its sample, so the fixed-model bound applies
        // to its training margin.
        assert!(report.parity_oracle_frequency <= report.bound + slack);
        // The memorizer's training margin obeys no such bound: its
        // training risk is pinned near zero while its expectation is not.
        assert!(report.memorizer_frequency > report.bound + slack);
        assert!(report.memorizer_frequency > 0.9);
    }
}
