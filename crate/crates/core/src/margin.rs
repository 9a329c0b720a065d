//! Mean overfitting-margin estimation from k independently trained models.
//!
//! Each of the k models contributes one empirical margin
//! `|e_train_j - e_holdout_j|`, where every holdout cost vector comes from
//! evaluating the same shared holdout set under model j (sharing the
//! holdout across models is what the union bound in the guarantee pays
//! for). The estimate is the plain mean of those margins and carries the
//! `4*exp(-k*eps^2/2)` bound; when the holdout is too small for the size
//! hypothesis the estimate is still returned, only the guarantee lapses.

use crate::bounds::{is_vacuous, margin_estimate_bound, min_holdout_size};
use crate::error::{Error, Result};
use crate::risk::{empirical_overfitting_margin, empirical_risk, CostVector};

/// One model's training costs and its costs on the shared holdout set.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginRun {
    pub train: CostVector,
    pub holdout: CostVector,
}

/// k paired cost vectors with common training size `m` and common holdout
/// size `m_prime`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginRunSet {
    runs: Vec<MarginRun>,
    m: usize,
    m_prime: usize,
}

impl MarginRunSet {
    /// Validates k >= 1 and dimensional consistency across runs.
    pub fn new(runs: Vec<MarginRun>) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::EmptyInput("run set"));
        }
        let m = runs[0].train.len();
        let m_prime = runs[0].holdout.len();
        for (i, run) in runs.iter().enumerate() {
            if run.train.len() != m {
                return Err(Error::RaggedRuns {
                    index: i,
                    axis: "train",
                    expected: m,
                    got: run.train.len(),
                });
            }
            if run.holdout.len() != m_prime {
                return Err(Error::RaggedRuns {
                    index: i,
                    axis: "holdout",
                    expected: m_prime,
                    got: run.holdout.len(),
                });
            }
        }
        Ok(MarginRunSet { runs, m, m_prime })
    }

    pub fn k(&self) -> usize {
        self.runs.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn m_prime(&self) -> usize {
        self.m_prime
    }

    pub fn runs(&self) -> &[MarginRun] {
        &self.runs
    }
}

/// The mean-margin estimate with its bound and hypothesis check.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginEstimate {
    /// `(1/k) * sum of |e_train_j - e_holdout_j|`.
    pub estimate: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub k: usize,
    /// `4*exp(-k*eps^2/2)`, raw (may exceed 1).
    pub bound: f64,
    pub vacuous: bool,
    /// Whether the shared holdout is large enough for the bound's size
    /// hypothesis. False is a warning, not an error: the point estimate
    /// stands, the guarantee does not.
    pub hypothesis_satisfied: bool,
    /// Smallest holdout size that would satisfy the hypothesis.
    pub required_m_prime: usize,
}

/// Estimates the mean overfitting margin from a run set.
pub fn estimate_mean_margin(
    runs: &MarginRunSet,
    epsilon: f64,
    delta: f64,
) -> Result<MarginEstimate> {
    let k = runs.k();
    let bound = margin_estimate_bound(epsilon, k)?;
    let required_m_prime = min_holdout_size(k, epsilon, delta)?;
    let sum: f64 = runs
        .runs()
        .iter()
        .map(|run| empirical_overfitting_margin(&run.train, &run.holdout))
        .sum();
    Ok(MarginEstimate {
        estimate: sum / k as f64,
        epsilon,
        delta,
        k,
        bound,
        vacuous: is_vacuous(bound),
        hypothesis_satisfied: runs.m_prime() >= required_m_prime,
        required_m_prime,
    })
}

/// Per-run terms of the estimate's triangle-inequality decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct RunDecomposition {
    /// `|e_holdout_j - E_j|`: how far the holdout risk sits from the
    /// model's true expectation.
    pub holdout_deviation: f64,
    /// `|E_j - e_train_j|`: the model's true overfitting margin.
    pub true_margin: f64,
}

/// Numeric decomposition of the estimate against oracle expectations.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginDecomposition {
    pub per_run: Vec<RunDecomposition>,
    pub mean_holdout_deviation: f64,
    pub mean_true_margin: f64,
    /// The mean empirical margin (same statistic as [`estimate_mean_margin`]).
    pub estimate: f64,
    /// `|estimate - mean_true_margin| <= mean_holdout_deviation`, with
    /// 1e-12 slack for accumulated rounding.
    pub chain_holds: bool,
}

/// Splits each empirical margin into the two terms the guarantee is built
/// from, given one oracle expectation per model, and checks the resulting
/// inequality chain numerically.
pub fn decompose_margin_error(
    runs: &MarginRunSet,
    true_expectations: &[f64],
) -> Result<MarginDecomposition> {
    if true_expectations.len() != runs.k() {
        return Err(Error::LengthMismatch {
            expected: runs.k(),
            got: true_expectations.len(),
        });
    }
    for (i, &e) in true_expectations.iter().enumerate() {
        if !(0.0..=1.0).contains(&e) {
            return Err(Error::out_of_range_at("true_expectation", i, e, 0.0, 1.0));
        }
    }

    let k = runs.k() as f64;
    let mut per_run = Vec::with_capacity(runs.k());
    let mut sum_holdout_dev = 0.0;
    let mut sum_true_margin = 0.0;
    let mut sum_empirical = 0.0;
    for (run, &expectation) in runs.runs().iter().zip(true_expectations) {
        let holdout_risk = empirical_risk(&run.holdout);
        let train_risk = empirical_risk(&run.train);
        let holdout_deviation = (holdout_risk - expectation).abs();
        let true_margin = (expectation - train_risk).abs();
        sum_holdout_dev += holdout_deviation;
        sum_true_margin += true_margin;
        sum_empirical += (train_risk - holdout_risk).abs();
        per_run.push(RunDecomposition {
            holdout_deviation,
            true_margin,
        });
    }
    let mean_holdout_deviation = sum_holdout_dev / k;
    let mean_true_margin = sum_true_margin / k;
    let estimate = sum_empirical / k;
    let chain_holds = (estimate - mean_true_margin).abs() <= mean_holdout_deviation + 1e-12;

    Ok(MarginDecomposition {
        per_run,
        mean_holdout_deviation,
        mean_true_margin,
        estimate,
        chain_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_run(train_value: f64, m: usize, holdout_value: f64, m_prime: usize) -> MarginRun {
        MarginRun {
            train: CostVector::constant(train_value, m).unwrap(),
            holdout: CostVector::constant(holdout_value, m_prime).unwrap(),
        }
    }

    #[test]
    fn single_run_estimate() {
        let runs = MarginRunSet::new(vec![constant_run(0.0, 10, 0.5, 2000)]).unwrap();
        let est = estimate_mean_margin(&runs, 0.1, 0.05).unwrap();
        assert!((est.estimate - 0.5).abs() < 1e-15);
        // m' = 2000 clears the ~600.2 requirement at k = 1.
        assert!(est.hypothesis_satisfied);
        assert_eq!(est.required_m_prime, 601);
        // 4*exp(-0.005): vacuous at k = 1.
        assert!((est.bound - 4.0 * (-0.005f64).exp()).abs() < 1e-15);
        assert!((est.bound - 3.98).abs() < 5e-3);
        assert!(est.vacuous);
    }

    #[test]
    fn estimate_is_mean_of_margins() {
        let runs = MarginRunSet::new(vec![
            constant_run(0.0, 5, 0.1, 7),
            constant_run(0.0, 5, 0.2, 7),
            constant_run(0.0, 5, 0.3, 7),
        ])
        .unwrap();
        let est = estimate_mean_margin(&runs, 0.1, 0.05).unwrap();
        assert!((est.estimate - 0.2).abs() < 1e-15);
        assert_eq!(est.k, 3);
        assert!(!est.hypothesis_satisfied);
    }

    #[test]
    fn ragged_holdouts_are_rejected() {
        let err = MarginRunSet::new(vec![
            constant_run(0.0, 5, 0.1, 7),
            constant_run(0.0, 5, 0.1, 8),
        ])
        .unwrap_err();
        assert_eq!(
            err,
            Error::RaggedRuns {
                index: 1,
                axis: "holdout",
                expected: 7,
                got: 8
            }
        );
    }

    #[test]
    fn ragged_trains_are_rejected() {
        let err = MarginRunSet::new(vec![
            constant_run(0.0, 5, 0.1, 7),
            constant_run(0.0, 6, 0.1, 7),
        ])
        .unwrap_err();
        assert!(matches!(
            err,
            Error::RaggedRuns {
                index: 1,
                axis: "train",
                ..
            }
        ));
    }

    #[test]
    fn empty_run_set_is_rejected() {
        assert_eq!(
            MarginRunSet::new(vec![]).unwrap_err(),
            Error::EmptyInput("run set")
        );
    }

    #[test]
    fn decomposition_collapses_when_holdout_matches_expectations() {
        let runs = MarginRunSet::new(vec![
            constant_run(0.0, 5, 0.3, 9),
            constant_run(0.1, 5, 0.2, 9),
        ])
        .unwrap();
        let d = decompose_margin_error(&runs, &[0.3, 0.2]).unwrap();
        assert_eq!(d.per_run[0].holdout_deviation, 0.0);
        assert_eq!(d.per_run[1].holdout_deviation, 0.0);
        assert!((d.estimate - d.mean_true_margin).abs() < 1e-15);
        assert!(d.chain_holds);
    }

    #[test]
    fn decomposition_worked_example() {
        // Holdout risks {0.35, 0.25}, expectations {0.30, 0.30},
        // training risks {0.0, 0.1}.
        let runs = MarginRunSet::new(vec![
            constant_run(0.0, 4, 0.35, 20),
            constant_run(0.1, 4, 0.25, 20),
        ])
        .unwrap();
        let d = decompose_margin_error(&runs, &[0.30, 0.30]).unwrap();
        assert!((d.per_run[0].holdout_deviation - 0.05).abs() < 1e-12);
        assert!((d.per_run[1].holdout_deviation - 0.05).abs() < 1e-12);
        assert!((d.per_run[0].true_margin - 0.30).abs() < 1e-12);
        assert!((d.per_run[1].true_margin - 0.20).abs() < 1e-12);
        assert!(d.chain_holds);
    }

    #[test]
    fn decomposition_validates_expectations() {
        let runs = MarginRunSet::new(vec![constant_run(0.0, 3, 0.5, 3)]).unwrap();
        assert!(matches!(
            decompose_margin_error(&runs, &[1.5]),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            decompose_margin_error(&runs, &[0.5, 0.5]),
            Err(Error::LengthMismatch {
                expected: 1,
                got: 2
            })
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arbitrary_run_set() -> impl Strategy<Value = (MarginRunSet, Vec<f64>)> {
            (1usize..8, 1usize..12, 1usize..12).prop_flat_map(|(k, m, mp)| {
                let runs = proptest::collection::vec(
                    (
                        proptest::collection::vec(0.0..=1.0f64, m..=m),
                        proptest::collection::vec(0.0..=1.0f64, mp..=mp),
                    ),
                    k..=k,
                );
                let expectations = proptest::collection::vec(0.0..=1.0f64, k..=k);
                (runs, expectations).prop_map(|(runs, expectations)| {
                    let runs = runs
                        .into_iter()
                        .map(|(t, h)| MarginRun {
                            train: CostVector::new(t).unwrap(),
                            holdout: CostVector::new(h).unwrap(),
                        })
                        .collect();
                    (MarginRunSet::new(runs).unwrap(), expectations)
                })
            })
        }

        proptest! {
            #[test]
            fn estimate_is_permutation_invariant((runs, _) in arbitrary_run_set(), seed in any::<u64>()) {
                let forward = estimate_mean_margin(&runs, 0.1, 0.05).unwrap().estimate;
                let mut shuffled = runs.runs().to_vec();
                let mut state = seed;
                for i in (1..shuffled.len()).rev() {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let j = (state >> 33) as usize % (i + 1);
                    shuffled.swap(i, j);
                }
                let shuffled = MarginRunSet::new(shuffled).unwrap();
                let backward = estimate_mean_margin(&shuffled, 0.1, 0.05).unwrap().estimate;
                prop_assert!((forward - backward).abs() <= 1e-12);
            }

            #[test]
            fn estimate_stays_in_unit_interval((runs, _) in arbitrary_run_set()) {
                let est = estimate_mean_margin(&runs, 0.2, 0.1).unwrap();
                prop_assert!((0.0..=1.0).contains(&est.estimate));
            }

            #[test]
            fn triangle_chain_holds((runs, expectations) in arbitrary_run_set()) {
                let d = decompose_margin_error(&runs, &expectations).unwrap();
                prop_assert!(d.chain_holds);
                let est = estimate_mean_margin(&runs, 0.1, 0.05).unwrap().estimate;
                prop_assert!((d.estimate - est).abs() <= 1e-12);
            }
        }
    }
}
