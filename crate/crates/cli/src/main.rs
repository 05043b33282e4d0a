//! Batch front-end for the volume-bound toolkit: single-shot solvers plus a
//! reproducible sweep/fit pipeline emitting CSV and companion `.dat` plot
//! data.
//!
//! Exit codes: `0` success, `2` bad input or unreadable/unwritable files,
//! `3` a solve failed to converge under `--strict` or a `--verify` check
//! failed.

mod commands;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "qregion",
    version,
    about = "Certified volume bounds for covariant estimation via composite hypothesis testing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal type-II error of a binary quantum hypothesis test.
    Beta(BetaArgs),
    /// Two-sided bracket of the invariant-alternative bound for one probe.
    InvariantBound(InvariantBoundArgs),
    /// Invariant-bound rows over builtin states and qubit counts.
    Sweep(SweepArgs),
    /// Representation-theoretic denominators and the floors they certify.
    RepBound(RepBoundArgs),
    /// Closed-form estimation corollaries.
    Corollary(CorollaryArgs),
    /// Covariant conditional entropy and the data-processing deficit.
    Entropy(EntropyArgs),
    /// Power-law fit of a sweep CSV column, per state.
    Fit(FitArgs),
}

/// State argument: a path to a state file, or `builtin:<label>` with
/// `--n` giving the qubit count.  Builtin labels: `ghz`, `plus`, `sine`,
/// `uniform`, `optimal-u1`.
#[derive(Args)]
struct StateArg {
    /// State file, or `builtin:<label>`.
    #[arg(long)]
    state: String,
    /// Qubit count for builtin states.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct BetaArgs {
    /// Null state file (normalized).
    #[arg(long, value_name = "FILE")]
    rho: PathBuf,
    /// Alternative state file (may be unnormalized).
    #[arg(long, value_name = "FILE")]
    sigma: PathBuf,
    /// Minimum detection probability of the test.
    #[arg(long)]
    alpha: f64,
    /// Write the CSV here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct InvariantBoundArgs {
    #[command(flatten)]
    state: StateArg,
    /// Minimum detection probability.
    #[arg(long)]
    alpha: f64,
    /// Relative bracket-width target.
    #[arg(long, default_value_t = qregion::constants::INVARIANT_DEFAULT_TOL)]
    tol: f64,
    /// Ascent iteration cap.
    #[arg(long, default_value_t = qregion::constants::INVARIANT_DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Re-solve the test against the returned invariant certificate and fail
    /// (exit 3) on a mismatch beyond 1e-8.
    #[arg(long)]
    verify: bool,
    /// Exit 3 when the bracket did not converge to the tolerance.
    #[arg(long)]
    strict: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Flat `key = value` config file; flags override its entries.  Keys:
    /// states, n-range, alpha, tol, output, parallel, workers.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Comma-separated state labels (builtins plus `pure-d2`, the exact
    /// qubit pure-state floor alpha/(N+1)).
    #[arg(long)]
    states: Option<String>,
    /// Qubit counts as `start:stop:step` (inclusive).
    #[arg(long)]
    n_range: Option<String>,
    /// Minimum detection probability.
    #[arg(long)]
    alpha: Option<f64>,
    /// Relative bracket-width target per solve.
    #[arg(long)]
    tol: Option<f64>,
    /// CSV output path; a companion `.dat` file with (N, lower) blocks is
    /// written next to it.  Stdout (and no `.dat`) when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Solve rows in parallel (rows are sorted before writing either way).
    #[arg(long)]
    parallel: Option<bool>,
    /// Worker-thread count for parallel sweeps.
    #[arg(long)]
    workers: Option<usize>,
    /// Exit 3 when any row did not converge to the tolerance.
    #[arg(long)]
    strict: bool,
    /// Re-solve each row against its invariant certificate and fail
    /// (exit 3) on a mismatch beyond 1e-8.
    #[arg(long)]
    verify: bool,
    /// Fill the `seconds` column with wall-clock times (breaks byte
    /// reproducibility; the column is 0 by default).
    #[arg(long)]
    timing: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum RepMode {
    /// Full-group estimation denominator over all irrep blocks.
    Group,
    /// Homogeneous (single-seen-copy) denominator via branching.
    Homogeneous,
    /// Mixed-state floor from the largest irrep dimension.
    Mixed,
    /// Pure-state floor from the symmetric-subspace dimension.
    Pure,
    /// Distinct total-weight count for a single-site weight list.
    #[value(name = "u1count")]
    U1Count,
}

impl RepMode {
    fn name(self) -> &'static str {
        match self {
            RepMode::Group => "group",
            RepMode::Homogeneous => "homogeneous",
            RepMode::Mixed => "mixed",
            RepMode::Pure => "pure",
            RepMode::U1Count => "u1count",
        }
    }
}

#[derive(Args)]
struct RepBoundArgs {
    /// Which denominator/floor family to tabulate.
    #[arg(long, value_enum)]
    mode: RepMode,
    /// Local dimension.
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Copy counts as `start:stop:step` (inclusive).
    #[arg(long)]
    n_range: String,
    /// Detection probability entering the floor column.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Single-site weights for `u1count`, comma-separated.
    #[arg(long, default_value = "1,-1")]
    site_weights: String,
    /// Write the CSV here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Which {
    /// Mean-squared-error floor under a `C/N` volume law.
    MseH,
    /// Mean-squared-error floor under a `D/sqrt(N)` volume law.
    MseSn,
    /// Entropic average-volume floor (plus the circular MSE floor).
    Entropic,
    /// Volume floor for energy-bounded probes.
    Energy,
    /// Separable-probe floors: closed form and window certificate.
    Separable,
    /// Window certificate for the nonlinear qubit coupling.
    Nonlinear,
    /// Average-volume floors for one probe state.
    Avg,
}

impl Which {
    fn name(self) -> &'static str {
        match self {
            Which::MseH => "mse-h",
            Which::MseSn => "mse-sn",
            Which::Entropic => "entropic",
            Which::Energy => "energy",
            Which::Separable => "separable",
            Which::Nonlinear => "nonlinear",
            Which::Avg => "avg",
        }
    }
}

#[derive(Args)]
struct CorollaryArgs {
    /// Which corollary to evaluate.
    #[arg(long, value_enum)]
    which: Which,
    /// Volume-law constant for `mse-h` / `mse-sn`.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Probe/site count.
    #[arg(long)]
    n: Option<usize>,
    /// Detection probability.
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    /// Conditional entropy input for `entropic`.
    #[arg(long)]
    h_cond: Option<f64>,
    /// Success probability for `entropic` / `energy`.
    #[arg(long, default_value_t = 0.9)]
    p_succ: f64,
    /// Parameter-space volume for `entropic`.
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    volume: f64,
    /// Mean energy for `energy`.
    #[arg(long)]
    energy: Option<f64>,
    /// Per-site weight cap for `separable`.
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Round count for `separable`.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Site amplitudes `a,b` for `separable` / `nonlinear` (default the
    /// balanced site).
    #[arg(long)]
    site: Option<String>,
    /// Auxiliary-qubit amplitudes `a,b` for `nonlinear`.
    #[arg(long)]
    aux: Option<String>,
    /// Detection sacrifice for `avg` (default `alpha/2`).
    #[arg(long)]
    eps: Option<f64>,
    /// State (file or `builtin:<label>`) for `avg`.
    #[arg(long)]
    state: Option<String>,
    /// Write the CSV here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    state: StateArg,
    /// Detection probability for the deficit column.
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    /// Parameter-space volume.
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    volume: f64,
    /// Write the CSV here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Sweep CSV to fit.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Column to fit against N.
    #[arg(long, default_value = "lower")]
    column: String,
    /// Write the CSV here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Beta(args) => commands::beta_cmd(&args),
        Command::InvariantBound(args) => commands::invariant_bound_cmd(&args),
        Command::Sweep(args) => sweep::sweep_cmd(&args),
        Command::RepBound(args) => commands::rep_bound_cmd(&args),
        Command::Corollary(args) => commands::corollary_cmd(&args),
        Command::Entropy(args) => commands::entropy_cmd(&args),
        Command::Fit(args) => commands::fit_cmd(&args),
    };
    match outcome {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
