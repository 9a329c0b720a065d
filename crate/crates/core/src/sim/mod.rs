//! Synthetic data, trainable toy models, and exact expectations.
//!
//! The harness draws labeled pairs from a finite discrete distribution
//! whose ground truth is the parity of x, optionally corrupted by
//! symmetric label noise. Because the domain is finite and the cost is
//! 0-1, the expected cost of any fitted model is computable in closed
//! form, which is what lets the Monte Carlo validators in
//! [`harness`](self) check every probability bound against an exact
//! oracle.
//!
//! Evaluation discipline everywhere: fix the model first, then draw the
//! data it is scored on. Scoring a model on the sample that trained it is
//! measured too, but only to demonstrate that no concentration bound
//! applies there.

mod harness;

pub use harness::{
    epoch_curve, mean_margin_oracle, training_concentration_report, validate_bound, EpochRecord,
    TrainingConcentrationReport, ValidationRecord, MARGIN_ORACLE_DRAWS,
};

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::risk::CostVector;

/// A labeled draw: domain point and binary label.
pub type LabeledSample = Vec<(usize, u8)>;

/// Ground-truth label of a domain point.
pub fn parity(x: usize) -> u8 {
    (x & 1) as u8
}

/// Finite joint distribution over (x, y): x categorical on `0..n`,
/// y = parity(x) flipped with probability `eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJoint {
    probs: Vec<f64>,
    cumulative: Vec<f64>,
    eta: f64,
}

impl DiscreteJoint {
    /// Validates that the x-probabilities are nonnegative and sum to 1
    /// within 1e-12, and that `eta` lies in `[0, 0.5)`.
    pub fn new(x_probs: Vec<f64>, eta: f64) -> Result<Self> {
        if x_probs.is_empty() {
            return Err(Error::EmptyInput("x probabilities"));
        }
        for (i, &p) in x_probs.iter().enumerate() {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::out_of_range_at("x_prob", i, p, 0.0, 1.0));
            }
        }
        let total: f64 = x_probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "x probabilities must sum to 1 within 1e-12, got {total}"
            )));
        }
        if !(eta.is_finite() && (0.0..0.5).contains(&eta)) {
            return Err(Error::Domain(format!(
                "label noise eta must lie in [0, 0.5), got {eta}"
            )));
        }
        let mut cumulative = Vec::with_capacity(x_probs.len());
        let mut acc = 0.0;
        for &p in &x_probs {
            acc += p;
            cumulative.push(acc);
        }
        Ok(DiscreteJoint {
            probs: x_probs,
            cumulative,
            eta,
        })
    }

    /// Uniform x-marginal on `0..n`.
    pub fn uniform(n: usize, eta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("domain size must be >= 1, got 0".into()));
        }
        Self::new(vec![1.0 / n as f64; n], eta)
    }

    pub fn domain_size(&self) -> usize {
        self.probs.len()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn x_probs(&self) -> &[f64] {
        &self.probs
    }

    fn sample_x(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.probs.len() - 1)
    }

    /// One labeled draw.
    pub fn sample_pair(&self, rng: &mut impl Rng) -> (usize, u8) {
        let x = self.sample_x(rng);
        let mut y = parity(x);
        if self.eta > 0.0 && rng.random::<f64>() < self.eta {
            y ^= 1;
        }
        (x, y)
    }
}

/// Model family to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelSpec {
    /// Lookup table from seen x to the majority of its observed labels
    /// (ties and unseen x predict 0). The empirical risk minimizer over
    /// the table class, and the canonical overfitter.
    Memorizer,
    /// Predicts 0 everywhere; ignores the sample.
    ConstantZero,
    /// Predicts parity(x); the Bayes rule, ignores the sample.
    ParityOracle,
}

impl ModelSpec {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelSpec::Memorizer => "memorizer",
            ModelSpec::ConstantZero => "constant_zero",
            ModelSpec::ParityOracle => "parity_oracle",
        }
    }
}

/// A fitted model: a total prediction function on the domain.
#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    Memorizer(HashMap<usize, u8>),
    ConstantZero,
    ParityOracle,
}

impl FittedModel {
    pub fn predict(&self, x: usize) -> u8 {
        match self {
            FittedModel::Memorizer(table) => table.get(&x).copied().unwrap_or(0),
            FittedModel::ConstantZero => 0,
            FittedModel::ParityOracle => parity(x),
        }
    }
}

fn memorizer_table(sample: &[(usize, u8)]) -> HashMap<usize, u8> {
    let mut counts: HashMap<usize, (u32, u32)> = HashMap::new();
    for &(x, y) in sample {
        let entry = counts.entry(x).or_insert((0, 0));
        entry.0 += u32::from(y == 1);
        entry.1 += 1;
    }
    counts
        .into_iter()
        .map(|(x, (ones, total))| (x, u8::from(2 * ones > total)))
        .collect()
}

/// Fits a model of the given family. The memorizer requires a non-empty
/// sample; the other families ignore it.
pub fn train(family: ModelSpec, sample: &[(usize, u8)]) -> Result<FittedModel> {
    match family {
        ModelSpec::Memorizer => {
            if sample.is_empty() {
                return Err(Error::EmptyInput("training sample"));
            }
            Ok(FittedModel::Memorizer(memorizer_table(sample)))
        }
        ModelSpec::ConstantZero => Ok(FittedModel::ConstantZero),
        ModelSpec::ParityOracle => Ok(FittedModel::ParityOracle),
    }
}

/// Memorizer over a possibly-empty prefix; an empty table predicts 0
/// everywhere. Used by the epoch curve.
fn fit_prefix(family: ModelSpec, prefix: &[(usize, u8)]) -> FittedModel {
    match family {
        ModelSpec::Memorizer => FittedModel::Memorizer(memorizer_table(prefix)),
        ModelSpec::ConstantZero => FittedModel::ConstantZero,
        ModelSpec::ParityOracle => FittedModel::ParityOracle,
    }
}

/// Draws `size` iid labeled pairs. Deterministic given the stream state.
pub fn sample_dataset(
    joint: &DiscreteJoint,
    size: usize,
    rng: &mut impl Rng,
) -> Result<LabeledSample> {
    if size == 0 {
        return Err(Error::Domain("sample size must be >= 1, got 0".into()));
    }
    Ok((0..size).map(|_| joint.sample_pair(rng)).collect())
}

/// 0-1 costs of a fitted model on a sample: element i is 0 when the
/// prediction matches the label, 1 otherwise.
pub fn cost_vector(model: &FittedModel, sample: &[(usize, u8)]) -> Result<CostVector> {
    if sample.is_empty() {
        return Err(Error::EmptyInput("sample"));
    }
    CostVector::new(
        sample
            .iter()
            .map(|&(x, y)| f64::from(model.predict(x) != y))
            .collect(),
    )
}

/// Exact expected 0-1 cost of a fitted model under the joint:
/// `sum over x of p(x) * (eta if the model matches parity(x), else 1 - eta)`.
pub fn exact_expectation(model: &FittedModel, joint: &DiscreteJoint) -> f64 {
    let eta = joint.eta();
    joint
        .x_probs()
        .iter()
        .enumerate()
        .map(|(x, &p)| {
            if model.predict(x) == parity(x) {
                p * eta
            } else {
                p * (1.0 - eta)
            }
        })
        .sum()
}

/// A seeded synthetic experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub joint: DiscreteJoint,
    pub model: ModelSpec,
    /// Training size per model.
    pub m: usize,
    /// Holdout size.
    pub m_prime: usize,
    /// Number of models per margin experiment.
    pub k: usize,
    /// Monte Carlo repetitions.
    pub trials: usize,
    pub seed: u64,
}

impl SimulationSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("m", self.m),
            ("m_prime", self.m_prime),
            ("k", self.k),
            ("trials", self.trials),
        ] {
            if value == 0 {
                return Err(Error::Domain(format!("{name} must be >= 1, got 0")));
            }
        }
        Ok(())
    }
}

// Substream lanes keep the validators, the margin oracle, and the epoch
// curve on disjoint portions of the keystream for one seed.
const LANE_TRIAL: u64 = 1;
const LANE_ORACLE: u64 = 2;
const LANE_CURVE: u64 = 3;

/// Counter-based substream: an independent generator determined entirely
/// by `(seed, lane, index)`, so per-trial work can run in any order or in
/// parallel without changing the draw a given trial sees.
fn substream(seed: u64, lane: u64, index: u64) -> ChaCha8Rng {
    debug_assert!(index < 1 << 48);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((lane << 48) | (index & 0x0000_FFFF_FFFF_FFFF));
    rng
}
