//! `steppursuit`: step-function approximation of CSV series, simulation
//! presets, baseline comparison and verification sweeps.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod io;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use steppursuit::verify::{run_suite, Suite, SweepConfig};
use steppursuit::{kmeans_1d, mse, reconstruct, run_pursuit, Preset, PursuitConfig, ScalarSequence};

use crate::io::{csv_bytes, emit, ColumnRef, Table};
use crate::report::{CompareReport, InputDescriptor, KMeansSummary, RunReport, VerifyReport};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or unreadable / malformed input.
    Input(String),
    /// A verification suite ran and found a violation.
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Verification(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<steppursuit::Error> for CliError {
    fn from(e: steppursuit::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "steppursuit", version, about = "Step-function approximation by matching pursuit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Approximate one CSV column by a sum of steps.
    Approx(ApproxArgs),
    /// Generate a preset series as CSV (t, value, state, true_mean).
    Simulate(SimulateArgs),
    /// Compare pursuit and k-means against a known mean path.
    Compare(CompareArgs),
    /// Run a verification sweep.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct PursuitFlags {
    /// Maximum number of pursuit iterations.
    #[arg(long = "max-iter", default_value_t = 10)]
    max_iter: usize,
    /// Stop once the residual L2 norm drops below this.
    #[arg(long = "residual-eps", default_value_t = 0.0)]
    residual_eps: f64,
    /// Stop once the best |coefficient| drops below this.
    #[arg(long = "coef-eps", default_value_t = 0.0)]
    coef_eps: f64,
    /// Constant added to the data before the pursuit and removed afterwards.
    #[arg(long = "shift", allow_hyphen_values = true)]
    shift: Option<f64>,
}

impl PursuitFlags {
    fn config(&self) -> Result<PursuitConfig, CliError> {
        Ok(PursuitConfig::new(self.max_iter)?
            .with_residual_epsilon(self.residual_eps)?
            .with_coefficient_epsilon(self.coef_eps)?
            .with_pre_shift(self.shift)?)
    }
}

#[derive(Args, Debug)]
struct ApproxArgs {
    /// Input CSV file.
    input: PathBuf,
    /// Value column, by header name or zero-based index.
    #[arg(long, default_value = "0")]
    column: ColumnRef,
    #[command(flatten)]
    pursuit: PursuitFlags,
    /// Minimum jump reported as a breakpoint.
    #[arg(long = "break-threshold", default_value_t = 0.0)]
    break_threshold: f64,
    /// Report path (JSON); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write plot data (t, value, reconstruction, residual) here.
    #[arg(long = "plot-csv")]
    plot_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// One of sim1-3state, sim2-4state, normal-mean2, normal-std, ar2, kmeans-2state.
    preset: String,
    /// Series length; the preset's own length when omitted.
    #[arg(long = "T")]
    len: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// CSV with a value column and a true-mean column.
    input: PathBuf,
    #[arg(long, default_value = "value")]
    column: ColumnRef,
    #[arg(long = "truth-column", default_value = "true_mean")]
    truth_column: ColumnRef,
    #[command(flatten)]
    pursuit: PursuitFlags,
    /// Number of k-means clusters.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write plot data (t, value, reconstruction, kmeans, true_mean) here.
    #[arg(long = "plot-csv")]
    plot_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// One of theorem1, theorem2, lemma1, lemma2, remark, energy.
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random trials; suite default when omitted.
    #[arg(long)]
    trials: Option<usize>,
    /// Largest random sequence length; suite default when omitted.
    #[arg(long)]
    n: Option<usize>,
    /// Spacing of the scale/translation grid.
    #[arg(long = "grid-step")]
    grid_step: Option<f64>,
    /// Spacing of the modulation grid.
    #[arg(long = "xi-step")]
    xi_step: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Input(format!("encoding report: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn descriptor(path: &Path, column: &ColumnRef, rows: usize) -> InputDescriptor {
    InputDescriptor {
        path: path.display().to_string(),
        column: column.to_string(),
        rows,
    }
}

fn cmd_approx(args: ApproxArgs) -> Result<(), CliError> {
    let config = args.pursuit.config()?;
    if !(args.break_threshold >= 0.0) {
        return Err(CliError::Input("--break-threshold must be >= 0".into()));
    }
    let table = Table::read(&args.input)?;
    let values = table.numeric_column(&args.column)?;
    let seq = ScalarSequence::new(values)?;
    let started = Instant::now();
    let exp = run_pursuit(&seq, &config)?;
    let elapsed = started.elapsed().as_secs_f64();
    let report = RunReport::new(
        descriptor(&args.input, &args.column, seq.len()),
        config,
        &exp,
        args.break_threshold,
        elapsed,
    );
    if let Some(path) = &args.plot_csv {
        let rows = (0..seq.len()).map(|i| {
            vec![
                (i + 1).to_string(),
                seq.values()[i].to_string(),
                report.reconstruction[i].to_string(),
                report.residual[i].to_string(),
            ]
        });
        io::write_atomic(path, &csv_bytes(&["t", "value", "reconstruction", "residual"], rows)?)?;
    }
    emit(args.out.as_deref(), &to_json(&report)?)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let preset: Preset = args.preset.parse()?;
    let len = args.len.unwrap_or_else(|| preset.default_len());
    if len == 0 {
        return Err(CliError::Input("--T must be at least 1".into()));
    }
    let out = preset.generate(len, args.seed)?;
    let rows = (0..out.len()).map(|i| {
        vec![
            (i + 1).to_string(),
            out.values.values()[i].to_string(),
            out.states.get(i).map(|s| s.to_string()).unwrap_or_default(),
            out.true_means.values()[i].to_string(),
        ]
    });
    emit(args.out.as_deref(), &csv_bytes(&["t", "value", "state", "true_mean"], rows)?)
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let config = args.pursuit.config()?;
    let table = Table::read(&args.input)?;
    for column in [&args.column, &args.truth_column] {
        if let ColumnRef::Name(name) = column {
            if !table.has_column(name) {
                return Err(CliError::Input(format!("missing column '{name}'")));
            }
        }
    }
    let values = ScalarSequence::new(table.numeric_column(&args.column)?)?;
    let truth = table.numeric_column(&args.truth_column)?;
    let started = Instant::now();
    let exp = run_pursuit(&values, &config)?;
    let recon = reconstruct(&exp);
    let clusters = kmeans_1d(&values, args.k, args.seed)?;
    let center_path = clusters.center_path();
    let kmeans_mse = mse(&center_path, &truth)?;
    let report = CompareReport {
        input: descriptor(&args.input, &args.column, values.len()),
        truth_column: args.truth_column.to_string(),
        config,
        terms: exp.terms.len(),
        pursuit_mse: mse(recon.values(), &truth)?,
        raw_mse: mse(values.values(), &truth)?,
        kmeans: KMeansSummary::new(args.k, args.seed, clusters, kmeans_mse),
        breakpoints: steppursuit::breakpoints(&exp, 0.0),
        elapsed_seconds: started.elapsed().as_secs_f64(),
    };
    if let Some(path) = &args.plot_csv {
        let rows = (0..values.len()).map(|i| {
            vec![
                (i + 1).to_string(),
                values.values()[i].to_string(),
                recon.values()[i].to_string(),
                center_path[i].to_string(),
                truth[i].to_string(),
            ]
        });
        io::write_atomic(path, &csv_bytes(&["t", "value", "reconstruction", "kmeans", "true_mean"], rows)?)?;
    }
    emit(args.out.as_deref(), &to_json(&report)?)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let suite: Suite = args.suite.parse()?;
    let mut config = SweepConfig::for_suite(suite);
    config.seed = args.seed;
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(n) = args.n {
        config.max_len = n;
    }
    if let Some(step) = args.grid_step {
        config.grid_step = step;
    }
    if let Some(step) = args.xi_step {
        config.xi_step = step;
    }
    let started = Instant::now();
    let suite_report = run_suite(suite, &config)?;
    let report = VerifyReport {
        suite: suite_report,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    };
    emit(args.out.as_deref(), &to_json(&report)?)?;
    eprintln!(
        "{}: {} checks, max violation {:e} (tolerance {:e}) -> {}",
        suite,
        report.suite.checks,
        report.suite.max_violation,
        report.suite.tolerance,
        if report.suite.passed { "pass" } else { "FAIL" }
    );
    if report.suite.passed {
        Ok(())
    } else {
        Err(CliError::Verification(report.suite.failures.join("; ")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Approx(a) => cmd_approx(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
