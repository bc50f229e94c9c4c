use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

mod commands;
mod report;
mod svg;

use commands::Failure;

/// Signed redundancy measures, KdV solitons and sech² wave-train fits.
///
/// Exit codes: 0 success, 2 input or I/O error, 3 domain or configuration
/// error, 4 fit did not converge (results are still written).
#[derive(Parser, Debug)]
#[command(name = "helixwave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Subset entropies, interaction information and redundancy of a contingency table
    Entropy(EntropyArgs),
    /// Evaluate a soliton field on a grid and check it against the KdV equation
    Soliton(SolitonArgs),
    /// Fit a train of sech² pulses to a t,y series
    Fit(FitArgs),
    /// Pearson, OLS and Engle-Granger between an empirical and a model series
    Validate(ValidateArgs),
    /// Print the embedded Dickey-Fuller critical values
    CriticalValues(OutputArgs),
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write the JSON report here instead of standard output
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    /// Contingency CSV: one label column per dimension, then a weight column
    #[arg(short, long, value_name = "FILE")]
    input: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    log_base: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SolitonArgs {
    /// Wavenumbers, e.g. 1,2,3
    #[arg(short, long, value_delimiter = ',', required = true, num_args = 1..)]
    k: Vec<f64>,
    /// Drift constant; with a single wavenumber this selects the accelerating soliton
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c1: f64,
    /// Coefficient of P P_x in the residual check
    #[arg(long, default_value_t = helixwave_core::soliton::DEFAULT_NONLINEARITY, allow_negative_numbers = true)]
    coeff: f64,
    /// Tau-function prefactor constants C, A, B
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.0, 0.0, 0.0], allow_negative_numbers = true)]
    prefactor: Vec<f64>,
    #[arg(long, default_value_t = -20.0, allow_negative_numbers = true)]
    x_min: f64,
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    x_max: f64,
    #[arg(long, default_value_t = 801)]
    nx: usize,
    #[arg(long, default_value_t = -0.01, allow_negative_numbers = true)]
    t_min: f64,
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    t_max: f64,
    #[arg(long, default_value_t = 11)]
    nt: usize,
    /// Write the field as x,t,value CSV
    #[arg(long, value_name = "FILE")]
    grid: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Free,
    RatioLocked,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveFormat {
    Csv,
    Svg,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Two-column t,y CSV
    #[arg(short, long, value_name = "FILE")]
    input: PathBuf,
    /// Number of pulses
    #[arg(short = 'n', long)]
    waves: usize,
    #[arg(long, value_enum, default_value_t = Mode::Free)]
    mode: Mode,
    #[arg(long, default_value_t = 500)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    #[arg(long, default_value_t = 8)]
    multistarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Odd moving-average window applied before fitting (0 = off)
    #[arg(long, default_value_t = 0)]
    smoothing_window: usize,
    /// Fit a constant offset as well
    #[arg(long)]
    free_baseline: bool,
    #[arg(long, default_value_t = 0.05)]
    ratio_tolerance: f64,
    /// Minimum peak prominence for initialization, as a fraction of the data range
    #[arg(long, default_value_t = 0.01)]
    min_prominence: f64,
    /// Per-parameter limits as lo:hi pairs, e.g. 0:inf,0.01:1,10:30
    #[arg(long, value_delimiter = ',', value_parser = parse_bound, allow_hyphen_values = true)]
    bounds: Option<Vec<(f64, f64)>>,
    /// Write the model curve here
    #[arg(long, value_name = "FILE")]
    curve: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = CurveFormat::Csv)]
    format: CurveFormat,
    /// Also sample the model on this many evenly spaced points
    #[arg(long, default_value_t = 0)]
    dense: usize,
    #[command(flatten)]
    out: OutputArgs,
}

fn parse_bound(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((p(lo)?, p(hi)?))
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "empirical"])))]
pub struct ValidateArgs {
    /// CSV with columns t, empirical, model
    #[arg(short, long, value_name = "FILE", conflicts_with_all = ["empirical", "model"])]
    input: Option<PathBuf>,
    /// t,y CSV of observations (with --model)
    #[arg(long, value_name = "FILE", requires = "model")]
    empirical: Option<PathBuf>,
    /// t,y CSV of model values (with --empirical)
    #[arg(long, value_name = "FILE", requires = "empirical")]
    model: Option<PathBuf>,
    /// Lagged differences in the unit-root regression
    #[arg(long, default_value_t = 0)]
    lags: usize,
    #[command(flatten)]
    out: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Entropy(a) => commands::entropy(a),
        Command::Soliton(a) => commands::soliton(a),
        Command::Fit(a) => commands::fit(a),
        Command::Validate(a) => commands::validate(a),
        Command::CriticalValues(a) => commands::critical_values(a),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("helixwave: {f}");
            f.exit_code()
        }
    }
}

impl Failure {
    fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Input(_) => ExitCode::from(2),
            Failure::Domain(_) => ExitCode::from(3),
        }
    }
}
