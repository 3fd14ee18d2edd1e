//! `tricomi`: self-tests, symbol checks, simulations, lifespan sweeps and
//! weak-form checks for `u_tt - t^(2m) Δu = |u_t|^p`.

mod checks;
mod config;
mod math;
mod output;
mod runs;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "tricomi", version, about = "Numerics for u_tt - t^(2m) Δu = |u_t|^p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Critical powers and lifespan exponents for (n, m, p).
    Exponents(ExponentsArgs),
    /// Identity-by-identity table of the special-function checks.
    SpecfunSelftest(SelftestArgs),
    /// Tabulate the decaying solution of λ'' = (2m/t) λ' + t^(2m) λ and check it.
    Lambda(LambdaArgs),
    /// Tabulate propagator symbols over frequency, or estimate bound constants.
    Symbols(SymbolsArgs),
    /// Run the spectral solver until blow-up or the horizon.
    Simulate(SimulateArgs),
    /// Blow-up runs over a list of amplitudes, with a lifespan fit.
    Sweep(SweepArgs),
    /// Fit lifespans from a records CSV.
    Fit(FitArgs),
    /// Weak-form residual of a stored run.
    VerifyWeakform(WeakformArgs),
    /// The integral inequality behind the blow-up argument, on a stored run.
    CheckInequality(InequalityArgs),
}

#[derive(clap::Args, Serialize)]
pub struct ExponentsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: f64,
    #[arg(long)]
    pub p: f64,
    /// Print JSON instead of a key = value table.
    #[arg(long)]
    #[serde(skip)]
    pub json: bool,
}

#[derive(clap::Args, Serialize)]
pub struct SelftestArgs {
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaCheck {
    Ode,
    Wronskian,
    Limits,
    Asymptotics,
    Series,
}

#[derive(clap::Args, Serialize)]
pub struct LambdaArgs {
    #[arg(long)]
    pub m: f64,
    #[arg(long, default_value_t = 0.01)]
    pub t_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    /// Log-spaced sample count.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [LambdaCheck::Ode, LambdaCheck::Wronskian])]
    pub check: Vec<LambdaCheck>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolCheck {
    Ode,
    Wronskian,
    Bounds,
    WaveLimit,
}

#[derive(clap::Args, Serialize)]
pub struct SymbolsArgs {
    #[arg(long)]
    pub m: f64,
    #[arg(long)]
    pub t: f64,
    /// Source time for the Duhamel kernels W1, W2, dtW1, dtW2.
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, default_value_t = 20.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// V1, V2, dtV1, dtV2, W1, W2, dtW1 or dtW2.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long, value_enum, default_value_t = SymbolCheck::Ode)]
    pub check: SymbolCheck,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(clap::Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long)]
    pub epsilon: f64,
    /// Points per axis.
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    /// Half-width of the periodic box.
    #[arg(long = "L", default_value_t = 64.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 0.5)]
    pub cfl: f64,
    /// Blow-up is declared when max |u_t| reaches this level.
    #[arg(long, default_value_t = 1e6)]
    pub threshold: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 10)]
    pub trace_stride: usize,
    /// Store field snapshots at this spacing (needed by verify-weakform and check-inequality).
    #[arg(long)]
    pub snapshot_dt: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub amp_f: f64,
    #[arg(long, default_value_t = 1.0)]
    pub amp_g: f64,
    /// Drop the nonlinearity.
    #[arg(long)]
    pub linear: bool,
    /// Diagnostic trace CSV.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Full trace with snapshots, as JSON.
    #[arg(long)]
    #[serde(skip)]
    pub trace_json: Option<PathBuf>,
}

#[derive(clap::Args, Serialize)]
pub struct SweepArgs {
    /// JSON or key = value file; missing keys keep their defaults.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Comma-separated amplitudes, overriding the file.
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Directory for records.csv, summary.json and manifest.json.
    #[arg(long)]
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
}

#[derive(clap::Args, Serialize)]
pub struct FitArgs {
    #[arg(long)]
    #[serde(skip)]
    pub records: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
}

/// Trace-based checks; `--m`, `--p`, `--n` must agree with the trace when given.
#[derive(clap::Args, Serialize)]
pub struct TraceArgs {
    #[arg(long)]
    #[serde(skip)]
    pub trace: PathBuf,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Cutoff scales: lo:hi:step or a comma list.
    #[arg(long = "M-grid")]
    pub m_grid: String,
    #[arg(long)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
}

#[derive(clap::Args, Serialize)]
pub struct WeakformArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub trace: TraceArgs,
    /// Largest accepted relative residual.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

#[derive(clap::Args, Serialize)]
pub struct InequalityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub trace: TraceArgs,
    /// Pass when constant * lhs >= rhs on every scale.
    #[arg(long, default_value_t = 1.0)]
    pub constant: f64,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Exponents(a) => math::exponents(&a),
        Command::SpecfunSelftest(a) => math::specfun_selftest(&a),
        Command::Lambda(a) => math::lambda(&a),
        Command::Symbols(a) => math::symbols(&a),
        Command::Simulate(a) => runs::simulate(&a),
        Command::Sweep(a) => runs::sweep(&a),
        Command::Fit(a) => runs::fit(&a),
        Command::VerifyWeakform(a) => checks::verify_weakform(&a),
        Command::CheckInequality(a) => checks::check_inequality(&a),
    };
    if let Err(failure) = outcome {
        eprintln!("{failure}");
        std::process::exit(failure.exit_code());
    }
}
