//! Generalization testing under explicit concentration bounds.
//!
//! Given per-sample costs in `[0, 1]` from a model's training data and
//! from a holdout set drawn after the model was fixed, this crate
//! decides whether the train/holdout gap is small enough to be explained
//! by sampling noise, quantifies how often that decision can be wrong,
//! estimates a hypothesis class's mean overfitting margin from repeated
//! training runs, and validates every bound it reports against seeded
//! Monte Carlo simulation with exactly computable expectations.
//!
//! Modules:
//!
//! - [`risk`]: cost vectors, empirical risk, overfitting margins.
//! - [`bounds`]: the closed-form tail bounds and the (epsilon, delta, m)
//!   solver.
//! - [`overfit`]: the train-vs-holdout hypothesis test with its three-way
//!   interpretation.
//! - [`margin`]: mean-margin estimation over k independently trained
//!   models.
//! - [`sim`]: the synthetic harness that checks all of the above.

pub mod bounds;
pub mod error;
pub mod margin;
pub mod overfit;
pub mod risk;
pub mod sim;

pub use bounds::{
    fixed_model_bound, is_vacuous, margin_estimate_bound, min_holdout_size, overfit_test_bound,
    solve_epsilon_from_ln_delta, solve_hoeffding, BoundKind, HoeffdingQuery, HoeffdingSolution,
    SolvedFor,
};
pub use error::{Error, Result};
pub use margin::{
    decompose_margin_error, estimate_mean_margin, MarginEstimate, MarginRun, MarginRunSet,
};
pub use overfit::{interpret_flag, run_test, Decision, Interpretation, TestConfig, TestReport};
pub use risk::{
    clip, empirical_overfitting_margin, empirical_risk, true_overfitting_margin, CostVector,
    RiskSummary,
};
pub use sim::{
    cost_vector, epoch_curve, exact_expectation, mean_margin_oracle, sample_dataset, train,
    validate_bound, DiscreteJoint, FittedModel, ModelSpec, SimulationSpec, ValidationRecord,
};
