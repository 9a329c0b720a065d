//! JSON report schemas. Every report carries `schema_version`; numbers
//! serialize at full round-trip precision; bounds additionally get a
//! fixed-width scientific string for human readers.

use serde::Serialize;

use genbound::sim::{EpochRecord, ValidationRecord};
use genbound::{BoundKind, HoeffdingSolution, MarginEstimate, TestReport};

use crate::SCHEMA_VERSION;

pub fn sci(value: f64) -> String {
    format!("{value:.6e}")
}

fn kind_name(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::FixedModel => "fixed_model",
        BoundKind::OverfitTest => "overfit_test",
        BoundKind::MarginEstimate => "margin_estimate",
    }
}

#[derive(Debug, Serialize)]
pub struct InterpretationJson {
    pub kind: &'static str,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct TestReportJson {
    pub schema_version: u32,
    pub m: usize,
    pub m_prime: usize,
    pub train_risk: f64,
    pub holdout_risk: f64,
    pub margin: f64,
    pub signed_gap: f64,
    pub epsilon: f64,
    pub null_precision: f64,
    pub bound: f64,
    pub bound_sci: String,
    pub vacuous: bool,
    pub flagged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub decision: &'static str,
    pub interpretations: Vec<InterpretationJson>,
}

impl TestReportJson {
    pub fn from_report(report: &TestReport, alpha: Option<f64>) -> Self {
        TestReportJson {
            schema_version: SCHEMA_VERSION,
            m: report.risk_summary.train_size,
            m_prime: report.risk_summary.holdout_size,
            train_risk: report.risk_summary.train_risk,
            holdout_risk: report.risk_summary.holdout_risk,
            margin: report.margin,
            signed_gap: report.signed_gap,
            epsilon: report.epsilon,
            null_precision: report.null_precision,
            bound: report.bound,
            bound_sci: sci(report.bound),
            vacuous: report.vacuous,
            flagged: report.flagged,
            alpha,
            decision: report.decision.as_str(),
            interpretations: report
                .interpretations
                .iter()
                .map(|record| InterpretationJson {
                    kind: record.kind.as_str(),
                    detail: record.detail.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SolveJson {
    pub schema_version: u32,
    pub epsilon: f64,
    pub delta: f64,
    pub ln_delta: f64,
    pub m: usize,
    pub solved_for: &'static str,
}

impl SolveJson {
    pub fn from_solution(solution: &HoeffdingSolution) -> Self {
        SolveJson {
            schema_version: SCHEMA_VERSION,
            epsilon: solution.epsilon,
            delta: solution.delta,
            ln_delta: solution.ln_delta,
            m: solution.m,
            solved_for: solution.solved_for.as_str(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MarginJson {
    pub schema_version: u32,
    pub estimate: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub k: usize,
    pub m: usize,
    pub m_prime: usize,
    pub bound: f64,
    pub bound_sci: String,
    pub vacuous: bool,
    pub hypothesis_satisfied: bool,
    pub required_m_prime: usize,
}

impl MarginJson {
    pub fn from_estimate(estimate: &MarginEstimate, m: usize, m_prime: usize) -> Self {
        MarginJson {
            schema_version: SCHEMA_VERSION,
            estimate: estimate.estimate,
            epsilon: estimate.epsilon,
            delta: estimate.delta,
            k: estimate.k,
            m,
            m_prime,
            bound: estimate.bound,
            bound_sci: sci(estimate.bound),
            vacuous: estimate.vacuous,
            hypothesis_satisfied: estimate.hypothesis_satisfied,
            required_m_prime: estimate.required_m_prime,
        }
    }
}

/// Spec echo shared by the simulation reports.
#[derive(Debug, Serialize)]
pub struct SimSpecJson {
    pub family: &'static str,
    pub n: usize,
    pub eta: f64,
    pub m: usize,
    pub m_prime: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
}

impl SimSpecJson {
    pub fn new(spec: &genbound::SimulationSpec) -> Self {
        SimSpecJson {
            family: spec.model.as_str(),
            n: spec.joint.domain_size(),
            eta: spec.joint.eta(),
            m: spec.m,
            m_prime: spec.m_prime,
            k: spec.k,
            trials: spec.trials,
            seed: spec.seed,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ValidationJson {
    pub schema_version: u32,
    pub kind: &'static str,
    pub epsilon: f64,
    pub delta: f64,
    pub bound: f64,
    pub bound_sci: String,
    pub slack: f64,
    pub trials: usize,
    pub violations: usize,
    pub violation_frequency: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub true_mean_margin: Option<f64>,
    pub spec: SimSpecJson,
}

impl ValidationJson {
    pub fn from_record(record: &ValidationRecord, spec: &genbound::SimulationSpec) -> Self {
        ValidationJson {
            schema_version: SCHEMA_VERSION,
            kind: kind_name(record.kind),
            epsilon: record.epsilon,
            delta: record.delta,
            bound: record.bound,
            bound_sci: sci(record.bound),
            slack: record.slack,
            trials: record.trials,
            violations: record.violations,
            violation_frequency: record.violation_frequency,
            pass: record.pass,
            true_mean_margin: record.true_mean_margin,
            spec: SimSpecJson::new(spec),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EpochJson {
    pub epoch: usize,
    pub memorized: usize,
    pub train_risk: f64,
    pub holdout_risk: f64,
    pub margin: f64,
    pub flagged: bool,
}

#[derive(Debug, Serialize)]
pub struct CurveJson {
    pub schema_version: u32,
    pub epsilon: f64,
    pub spec: SimSpecJson,
    pub epochs: Vec<EpochJson>,
}

impl CurveJson {
    pub fn from_curve(
        curve: &[EpochRecord],
        spec: &genbound::SimulationSpec,
        epsilon: f64,
    ) -> Self {
        CurveJson {
            schema_version: SCHEMA_VERSION,
            epsilon,
            spec: SimSpecJson::new(spec),
            epochs: curve
                .iter()
                .map(|record| EpochJson {
                    epoch: record.epoch,
                    memorized: record.memorized,
                    train_risk: record.train_risk,
                    holdout_risk: record.holdout_risk,
                    margin: record.margin,
                    flagged: record.flagged,
                })
                .collect(),
        }
    }
}

/// Compact single-line JSON with a trailing newline; reports are meant to
/// be piped.
pub fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut line = serde_json::to_string(value).expect("report types always serialize");
    line.push('\n');
    line
}
