//! `genbound`: test a model's generalization from cost files, solve
//! Hoeffding triples, estimate mean overfitting margins, and validate the
//! reported bounds by seeded simulation.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use genbound::{BoundKind, ModelSpec};
use genbound_cli::commands::{
    build_spec, cmd_margin, cmd_simulate, cmd_solve, cmd_test, cmd_validate_bounds, CommandOutput,
};
use genbound_cli::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    /// Lookup-table model; memorizes majority labels (the overfitter).
    Memorizer,
    /// Always predicts 0.
    ConstantZero,
    /// Predicts the true parity rule.
    ParityOracle,
}

impl From<FamilyArg> for ModelSpec {
    fn from(arg: FamilyArg) -> Self {
        match arg {
            FamilyArg::Memorizer => ModelSpec::Memorizer,
            FamilyArg::ConstantZero => ModelSpec::ConstantZero,
            FamilyArg::ParityOracle => ModelSpec::ParityOracle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    /// Holdout mean vs. exact expectation of a frozen model.
    FixedModel,
    /// Train/holdout gap under the generalization null.
    OverfitTest,
    /// Mean-of-k margin estimate vs. the oracle mean margin.
    MarginEstimate,
}

impl From<KindArg> for BoundKind {
    fn from(arg: KindArg) -> Self {
        match arg {
            KindArg::FixedModel => BoundKind::FixedModel,
            KindArg::OverfitTest => BoundKind::OverfitTest,
            KindArg::MarginEstimate => BoundKind::MarginEstimate,
        }
    }
}

#[derive(Parser)]
#[command(name = "genbound", version, about = "Generalization testing under explicit concentration bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test whether one model's train/holdout gap exceeds epsilon.
    ///
    /// Exit code 0 when the null is retained, 3 when rejected.
    Test {
        /// Cost file for the training data (one value per line).
        #[arg(long)]
        train: PathBuf,
        /// Cost file for the holdout data.
        #[arg(long)]
        holdout: PathBuf,
        /// Gap threshold in (0, 1); the null tested is epsilon/2-generalization.
        #[arg(long)]
        epsilon: f64,
        /// Reject only if the bound is also at most this significance level.
        #[arg(long)]
        alpha: Option<f64>,
        /// Lower end of a declared probe range (values rescaled to [0, 1]).
        #[arg(long, requires = "probe_hi", allow_hyphen_values = true)]
        probe_lo: Option<f64>,
        /// Upper end of a declared probe range.
        #[arg(long, requires = "probe_lo", allow_hyphen_values = true)]
        probe_hi: Option<f64>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complete an (epsilon, delta, m) triple from any two members.
    Solve {
        /// Precision in (0, 1).
        #[arg(long)]
        epsilon: Option<f64>,
        /// Two-sided tail mass; solutions may exceed 1 (vacuous).
        #[arg(long)]
        delta: Option<f64>,
        /// Sample size.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the mean overfitting margin from a JSONL run-set file.
    Margin {
        /// Run-set file: one {"train_costs": [...], "holdout_costs": [...]} per line.
        #[arg(long)]
        runs: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Confidence parameter of the holdout-size hypothesis.
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace train/holdout risk for an incrementally fitted model.
    Simulate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Domain size of the synthetic distribution.
        #[arg(long)]
        n: usize,
        /// Label noise rate in [0, 0.5).
        #[arg(long)]
        eta: f64,
        /// Training size.
        #[arg(long)]
        m: usize,
        /// Holdout size.
        #[arg(long)]
        m_prime: usize,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo-validate a bound; exit 3 if the bound is violated.
    ValidateBounds {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        m_prime: usize,
        /// Models per margin experiment (margin-estimate kind).
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        epsilon: f64,
        /// Confidence parameter of the margin-estimate size hypothesis.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(output: CommandOutput, out: Option<&PathBuf>) -> Result<u8, CliError> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.json.as_bytes())
                .map_err(|e| CliError::Input(format!("stdout: {e}")))?;
        }
        Some(path) => {
            fs::write(path, output.json)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        }
    }
    Ok(output.exit_code)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Test {
            train,
            holdout,
            epsilon,
            alpha,
            probe_lo,
            probe_hi,
            out,
        } => {
            let probe_range = match (probe_lo, probe_hi) {
                (Some(lo), Some(hi)) => Some((lo, hi)),
                _ => None,
            };
            let output = cmd_test(&train, &holdout, epsilon, alpha, probe_range)?;
            emit(output, out.as_ref())
        }
        Command::Solve {
            epsilon,
            delta,
            m,
            out,
        } => emit(cmd_solve(epsilon, delta, m)?, out.as_ref()),
        Command::Margin {
            runs,
            epsilon,
            delta,
            out,
        } => emit(cmd_margin(&runs, epsilon, delta)?, out.as_ref()),
        Command::Simulate {
            family,
            n,
            eta,
            m,
            m_prime,
            epochs,
            epsilon,
            seed,
            out,
        } => {
            let spec = build_spec(family.into(), n, eta, m, m_prime, 1, 1, seed)?;
            emit(cmd_simulate(&spec, epochs, epsilon)?, out.as_ref())
        }
        Command::ValidateBounds {
            kind,
            family,
            n,
            eta,
            m,
            m_prime,
            k,
            trials,
            epsilon,
            delta,
            seed,
            out,
        } => {
            let spec = build_spec(family.into(), n, eta, m, m_prime, k, trials, seed)?;
            emit(
                cmd_validate_bounds(&spec, kind.into(), epsilon, delta)?,
                out.as_ref(),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
