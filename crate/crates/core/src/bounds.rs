//! Closed-form tail bounds and the (epsilon, delta, m) solver.
//!
//! Three two-sided exponential bounds are used throughout the crate:
//!
//! ```text
//! fixed model      P(|E - e_holdout| > eps)            < 2*exp(-2*eps^2*m')
//! overfit test     P(|e_train - e_holdout| > eps)      <= 2*exp(-eps^2*m'/2)
//! margin estimate  P(|mean margin - true mean| > eps)  <= 4*exp(-k*eps^2/2)
//! ```
//!
//! All logarithms are natural. Bounds above 1 are returned raw (callers
//! may flag them with [`is_vacuous`]); clamping would break the algebraic
//! identities the tests rely on.

use crate::error::{Error, Result};

/// Which bound a simulation validates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Holdout risk concentrates around the expectation of a model fixed
    /// before the holdout draw.
    FixedModel,
    /// Train/holdout gap under the eps/2-generalization null.
    OverfitTest,
    /// Mean empirical margin over k independently trained models.
    MarginEstimate,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon.is_finite() && 0.0 < epsilon && epsilon < 1.0) {
        return Err(Error::Domain(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(())
}

fn check_count(name: &str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain(format!("{name} must be >= 1, got 0")));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta.is_finite() && 0.0 < delta && delta < 1.0) {
        return Err(Error::Domain(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    Ok(())
}

/// `2*exp(-2*eps^2*m')`: two-sided Hoeffding tail for the mean of `m'`
/// fresh draws against the expectation of an already-fixed model.
pub fn fixed_model_bound(epsilon: f64, m_prime: usize) -> Result<f64> {
    check_epsilon(epsilon)?;
    check_count("m_prime", m_prime)?;
    Ok(2.0 * (-2.0 * epsilon * epsilon * m_prime as f64).exp())
}

/// `2*exp(-eps^2*m'/2)`: tail bound for the train/holdout gap exceeding
/// `eps` when the model eps/2-generalizes. Algebraically equal to
/// [`fixed_model_bound`] evaluated at `eps/2`.
pub fn overfit_test_bound(epsilon: f64, m_prime: usize) -> Result<f64> {
    check_epsilon(epsilon)?;
    check_count("m_prime", m_prime)?;
    Ok(2.0 * (-0.5 * epsilon * epsilon * m_prime as f64).exp())
}

/// `4*exp(-k*eps^2/2)`: tail bound on the mean-of-k empirical margins
/// deviating from the true mean margin by more than `eps`.
pub fn margin_estimate_bound(epsilon: f64, k: usize) -> Result<f64> {
    check_epsilon(epsilon)?;
    check_count("k", k)?;
    Ok(4.0 * (-0.5 * k as f64 * epsilon * epsilon).exp())
}

/// A bound above 1 carries no information.
pub fn is_vacuous(bound: f64) -> bool {
    bound > 1.0
}

/// Smallest holdout size `m'` strictly greater than
/// `k + 2*ln(k/delta)/eps^2`, the hypothesis under which the
/// margin-estimate bound holds.
pub fn min_holdout_size(k: usize, epsilon: f64, delta: f64) -> Result<usize> {
    check_count("k", k)?;
    check_epsilon(epsilon)?;
    check_delta(delta)?;
    let threshold = k as f64 + 2.0 * (k as f64 / delta).ln() / (epsilon * epsilon);
    if threshold >= usize::MAX as f64 {
        return Err(Error::Infeasible(format!(
            "required holdout size {threshold:.3e} exceeds addressable sizes"
        )));
    }
    // Strictly greater than the threshold, so an exactly-integral
    // threshold still rounds up.
    Ok(threshold.floor() as usize + 1)
}

/// The two proof terms behind the margin-estimate bound: a union bound
/// over the k per-model holdout deviations plus a Hoeffding term for the
/// mean of the k true margins (each taken at precision `eps/2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginBoundDecomposition {
    /// `2k*exp(-m'*eps^2/2)`: all k holdout risks stay within eps/2.
    pub holdout_term: f64,
    /// `2*exp(-k*eps^2/2)`: the mean of the k true margins stays within eps/2.
    pub margin_term: f64,
    /// Sum of the two terms.
    pub total: f64,
}

impl MarginBoundDecomposition {
    /// Same total in factored form, `2*exp(-k*eps^2/2) * (k*exp(-(m'-k)*eps^2/2) + 1)`;
    /// the route the final `4*exp(-k*eps^2/2)` bound is read off from.
    pub fn factored(epsilon: f64, k: usize, m_prime: usize) -> f64 {
        let half_eps_sq = 0.5 * epsilon * epsilon;
        let excess = m_prime as f64 - k as f64;
        2.0 * (-(k as f64) * half_eps_sq).exp() * (k as f64 * (-excess * half_eps_sq).exp() + 1.0)
    }
}

/// Splits the margin-estimate bound into its two proof terms.
pub fn margin_bound_decomposition(
    epsilon: f64,
    k: usize,
    m_prime: usize,
) -> Result<MarginBoundDecomposition> {
    check_epsilon(epsilon)?;
    check_count("k", k)?;
    check_count("m_prime", m_prime)?;
    let holdout_term = k as f64 * overfit_test_bound(epsilon, m_prime)?;
    let margin_term = 2.0 * (-0.5 * k as f64 * epsilon * epsilon).exp();
    Ok(MarginBoundDecomposition {
        holdout_term,
        margin_term,
        total: holdout_term + margin_term,
    })
}

/// A partially specified `(epsilon, delta, m)` triple with exactly one
/// unknown, tied together by `delta = 2*exp(-2*eps^2*m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoeffdingQuery {
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub m: Option<usize>,
}

/// Which field [`solve_hoeffding`] filled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolvedFor {
    Epsilon,
    Delta,
    M,
}

impl SolvedFor {
    pub fn as_str(self) -> &'static str {
        match self {
            SolvedFor::Epsilon => "epsilon",
            SolvedFor::Delta => "delta",
            SolvedFor::M => "m",
        }
    }
}

/// A completed `(epsilon, delta, m)` triple.
///
/// `ln_delta` is the natural log of `delta`, kept alongside it because
/// the solved delta `2*exp(-2*eps^2*m)` underflows f64 well inside the
/// meaningful parameter range (the exponent passes -745 around
/// `eps^2*m > 373`). The log form is always finite and is what
/// [`solve_epsilon_from_ln_delta`] inverts exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoeffdingSolution {
    pub epsilon: f64,
    pub delta: f64,
    pub ln_delta: f64,
    pub m: usize,
    pub solved_for: SolvedFor,
}

/// Completes the third member of an `(epsilon, delta, m)` triple.
///
/// Solving for `delta` evaluates `2*exp(-2*eps^2*m)` exactly (the result
/// may be vacuous, up to but never reaching 2). Solving for `m` returns
/// the smallest integer with `2*exp(-2*eps^2*m) <= delta`. Solving for
/// `epsilon` inverts to `sqrt(ln(2/delta)/(2m))` and fails as infeasible
/// when the result cannot stay below 1.
///
/// A supplied `delta` is accepted anywhere in `(0, 2)`: solved deltas are
/// returned raw above 1, so a round trip must be able to consume them.
/// `delta >= 2` is infeasible outright.
pub fn solve_hoeffding(query: &HoeffdingQuery) -> Result<HoeffdingSolution> {
    let unknowns = [
        query.epsilon.is_none(),
        query.delta.is_none(),
        query.m.is_none(),
    ]
    .iter()
    .filter(|&&missing| missing)
    .count();
    if unknowns != 1 {
        return Err(Error::Domain(format!(
            "exactly one of epsilon/delta/m must be unknown, got {unknowns} unknowns"
        )));
    }

    if let Some(epsilon) = query.epsilon {
        check_epsilon(epsilon)?;
    }
    if let Some(delta) = query.delta {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::Domain(format!(
                "delta must be positive and finite, got {delta}"
            )));
        }
        if delta >= 2.0 {
            return Err(Error::Infeasible(format!(
                "delta = {delta} can never be met: the two-sided bound is always below 2"
            )));
        }
    }
    if let Some(m) = query.m {
        check_count("m", m)?;
    }

    match (query.epsilon, query.delta, query.m) {
        (Some(epsilon), Some(delta), None) => {
            // ln(2/delta) as ln2 - ln(delta): stays finite for subnormal
            // deltas where 2/delta would overflow.
            let target = (std::f64::consts::LN_2 - delta.ln()) / (2.0 * epsilon * epsilon);
            if target >= usize::MAX as f64 {
                return Err(Error::Infeasible(format!(
                    "required sample size {target:.3e} exceeds addressable sizes"
                )));
            }
            let mut m = (target.ceil() as usize).max(1);
            // Settle float edge cases against the defining inequality.
            while fixed_model_bound(epsilon, m)? > delta {
                m += 1;
            }
            while m > 1 && fixed_model_bound(epsilon, m - 1)? <= delta {
                m -= 1;
            }
            Ok(HoeffdingSolution {
                epsilon,
                delta,
                ln_delta: delta.ln(),
                m,
                solved_for: SolvedFor::M,
            })
        }
        (Some(epsilon), None, Some(m)) => Ok(HoeffdingSolution {
            epsilon,
            delta: fixed_model_bound(epsilon, m)?,
            ln_delta: std::f64::consts::LN_2 - 2.0 * epsilon * epsilon * m as f64,
            m,
            solved_for: SolvedFor::Delta,
        }),
        (None, Some(delta), Some(m)) => {
            let epsilon = solve_epsilon_from_ln_delta(delta.ln(), m)?;
            Ok(HoeffdingSolution {
                epsilon,
                delta,
                ln_delta: delta.ln(),
                m,
                solved_for: SolvedFor::Epsilon,
            })
        }
        _ => unreachable!("exactly one unknown was verified above"),
    }
}

/// Inverts `delta = 2*exp(-2*eps^2*m)` for epsilon given `ln(delta)`:
/// `eps = sqrt((ln2 - ln_delta) / (2m))`.
///
/// This is the underflow-safe route: a solved delta may round to zero as
/// an f64 while its log stays finite, and this inverse loses nothing in
/// that regime.
pub fn solve_epsilon_from_ln_delta(ln_delta: f64, m: usize) -> Result<f64> {
    check_count("m", m)?;
    if ln_delta.is_nan() || ln_delta >= std::f64::consts::LN_2 {
        return Err(Error::Domain(format!(
            "ln_delta must be below ln 2, got {ln_delta}"
        )));
    }
    let epsilon = ((std::f64::consts::LN_2 - ln_delta) / (2.0 * m as f64)).sqrt();
    if epsilon >= 1.0 {
        return Err(Error::Infeasible(format!(
            "solved epsilon = {epsilon:.6} is not below 1; increase m or delta"
        )));
    }
    Ok(epsilon)
}
