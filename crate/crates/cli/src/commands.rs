//! Command implementations. Each returns the JSON report plus the exit
//! code; writing to stdout or `--out` stays in `main`.

use std::path::Path;

use genbound::{
    epoch_curve, estimate_mean_margin, run_test, solve_hoeffding, validate_bound, BoundKind,
    Decision, Error, HoeffdingQuery, SimulationSpec, TestConfig,
};

use crate::report::{
    to_json_line, CurveJson, MarginJson, SolveJson, TestReportJson, ValidationJson,
};
use crate::{cost_file, runset_file, CliError, EXIT_REJECTED};

pub struct CommandOutput {
    pub json: String,
    pub exit_code: u8,
}

fn ok(json: String) -> CommandOutput {
    CommandOutput { json, exit_code: 0 }
}

/// Maps a core error on a parsed cost file back to a file:line diagnostic.
fn locate_range_error(err: Error, file: &cost_file::CostFile, path: &Path) -> CliError {
    if let Error::OutOfRange {
        index: Some(index),
        value,
        lo,
        hi,
        ..
    } = err
    {
        CliError::Input(format!(
            "{}:{}: value {value} outside [{lo}, {hi}]",
            path.display(),
            file.line_of(index)
        ))
    } else {
        CliError::Input(err.to_string())
    }
}

pub fn cmd_test(
    train_path: &Path,
    holdout_path: &Path,
    epsilon: f64,
    alpha: Option<f64>,
    probe_range: Option<(f64, f64)>,
) -> Result<CommandOutput, CliError> {
    let train = cost_file::parse(train_path)?;
    let holdout = cost_file::parse(holdout_path)?;
    let config = TestConfig {
        epsilon,
        significance_alpha: alpha,
        probe_range,
    };
    let report = run_test(&train.values, &holdout.values, &config).map_err(|err| match &err {
        Error::OutOfRange { what, .. } if what.starts_with("train") => {
            locate_range_error(err.clone(), &train, train_path)
        }
        Error::OutOfRange { .. } => locate_range_error(err.clone(), &holdout, holdout_path),
        Error::Domain(msg) => CliError::Usage(msg.clone()),
        _ => CliError::Input(err.to_string()),
    })?;
    let json = to_json_line(&TestReportJson::from_report(&report, alpha));
    Ok(CommandOutput {
        json,
        exit_code: match report.decision {
            Decision::NullRetained => 0,
            Decision::NullRejected => EXIT_REJECTED,
        },
    })
}

pub fn cmd_solve(
    epsilon: Option<f64>,
    delta: Option<f64>,
    m: Option<usize>,
) -> Result<CommandOutput, CliError> {
    let provided = [epsilon.is_some(), delta.is_some(), m.is_some()]
        .iter()
        .filter(|&&set| set)
        .count();
    if provided != 2 {
        return Err(CliError::Usage(format!(
            "exactly two of --epsilon/--delta/--m must be given, got {provided}"
        )));
    }
    let solution = solve_hoeffding(&HoeffdingQuery { epsilon, delta, m }).map_err(
        |err| match err {
            Error::Domain(msg) => CliError::Usage(msg),
            other => CliError::Input(other.to_string()),
        },
    )?;
    Ok(ok(to_json_line(&SolveJson::from_solution(&solution))))
}

pub fn cmd_margin(
    runset_path: &Path,
    epsilon: f64,
    delta: f64,
) -> Result<CommandOutput, CliError> {
    let runs = runset_file::parse(runset_path)?;
    let estimate = estimate_mean_margin(&runs, epsilon, delta).map_err(|err| match err {
        Error::Domain(msg) => CliError::Usage(msg),
        other => CliError::Input(other.to_string()),
    })?;
    if !estimate.hypothesis_satisfied {
        eprintln!(
            "warning: holdout size {} is below the {} required for the bound's \
             size hypothesis; the estimate stands but the bound's guarantee does not",
            runs.m_prime(),
            estimate.required_m_prime
        );
    }
    Ok(ok(to_json_line(&MarginJson::from_estimate(
        &estimate,
        runs.m(),
        runs.m_prime(),
    ))))
}

#[allow(clippy::too_many_arguments)]
pub fn build_spec(
    family: genbound::ModelSpec,
    n: usize,
    eta: f64,
    m: usize,
    m_prime: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<SimulationSpec, CliError> {
    let joint = genbound::DiscreteJoint::uniform(n, eta).map_err(|err| match err {
        Error::Domain(msg) => CliError::Usage(msg),
        other => CliError::Usage(other.to_string()),
    })?;
    let spec = SimulationSpec {
        joint,
        model: family,
        m,
        m_prime,
        k,
        trials,
        seed,
    };
    spec.validate()
        .map_err(|err| CliError::Usage(err.to_string()))?;
    Ok(spec)
}

pub fn cmd_simulate(
    spec: &SimulationSpec,
    epochs: usize,
    epsilon: f64,
) -> Result<CommandOutput, CliError> {
    let curve = epoch_curve(spec, epochs, epsilon).map_err(|err| match err {
        Error::Domain(msg) => CliError::Usage(msg),
        other => CliError::Input(other.to_string()),
    })?;
    Ok(ok(to_json_line(&CurveJson::from_curve(
        &curve, spec, epsilon,
    ))))
}

pub fn cmd_validate_bounds(
    spec: &SimulationSpec,
    kind: BoundKind,
    epsilon: f64,
    delta: f64,
) -> Result<CommandOutput, CliError> {
    let record = validate_bound(spec, kind, epsilon, delta).map_err(|err| match err {
        Error::Domain(msg) => CliError::Usage(msg),
        other => CliError::Input(other.to_string()),
    })?;
    let json = to_json_line(&ValidationJson::from_record(&record, spec));
    Ok(CommandOutput {
        json,
        exit_code: if record.pass { 0 } else { EXIT_REJECTED },
    })
}
