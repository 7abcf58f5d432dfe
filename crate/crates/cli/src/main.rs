//! `ringorbit` command-line driver.
//!
//! Exit codes: 0 success, 2 argument or input error, 3 non-convergence (or a
//! loop that fails `verify`). Machine-readable output goes to stdout as a
//! single JSON object (or CSV where requested); everything else goes to
//! stderr.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ringorbit_core::action::OVERSAMPLING;
use ringorbit_core::dynamics::{StepperRegistry, DEFAULT_DT, DEFAULT_STEPS};
use ringorbit_core::loopspace::{SymmetryClass, DEFAULT_MAX_HARMONIC};
use ringorbit_core::optimize::MinimizerRegistry;

#[derive(Debug, Parser)]
#[command(name = "ringorbit", version, about = "Axial periodic orbits above a rotating ring of N equal masses")]
struct Cli {
    /// Log progress (multi-start outcomes etc.) to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ring radius, cosecant sum, force-balance residual and the 4/N identity check.
    Radius {
        #[arg(long)]
        n: usize,
    },
    /// Minimize the axial action in a symmetry class (multi-start).
    Minimize(MinimizeArgs),
    /// Second-variation analysis at the planar loop, for one N or a scan.
    Jacobi(JacobiArgs),
    /// Integrate the axial equation of motion.
    Integrate(IntegrateArgs),
    /// Check a loop file against the equations of motion.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Space {
    Lambda1,
    Lambda2,
}

impl From<Space> for SymmetryClass {
    fn from(s: Space) -> Self {
        match s {
            Space::Lambda1 => SymmetryClass::Lambda1,
            Space::Lambda2 => SymmetryClass::Lambda2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StartKind {
    Random,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct MinimizeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "lambda1")]
    space: Space,
    /// Truncation order K of the trigonometric series.
    #[arg(long, default_value_t = DEFAULT_MAX_HARMONIC)]
    harmonics: usize,
    /// Quadrature nodes; at least 8 x harmonics (default exactly that).
    #[arg(long)]
    grid: Option<usize>,
    /// Stop when the coefficient-space gradient 2-norm is at most this.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Seeds for the random starting loops, comma separated.
    #[arg(long = "seed", value_delimiter = ',', default_values_t = [0u64, 1, 2, 3])]
    seeds: Vec<u64>,
    #[arg(long = "max-iter", default_value_t = 5000)]
    max_iter: usize,
    #[arg(long, value_enum, default_value = "random")]
    start: StartKind,
    /// Do not kick an exactly planar start off the critical point.
    #[arg(long = "no-perturb")]
    no_perturb: bool,
    /// Optimizer strategy (bfgs, lbfgs, steepest).
    #[arg(long, default_value = MinimizerRegistry::DEFAULT)]
    optimizer: String,
    /// Amplitude (max |z|) above which the loop counts as nonplanar.
    #[arg(long = "planarity-threshold", default_value_t = 1e-3)]
    planarity_threshold: f64,
    /// Write the minimizing loop as loop JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct JacobiArgs {
    #[arg(long, conflicts_with = "scan", required_unless_present = "scan")]
    n: Option<usize>,
    /// Inclusive range `a:b` of ring sizes to scan.
    #[arg(long)]
    scan: Option<String>,
    /// Scan CSV destination; without it the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct IntegrateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    z0: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    v0: f64,
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    steps: usize,
    /// Time-stepping scheme (rk4, verlet).
    #[arg(long, default_value = StepperRegistry::DEFAULT)]
    integrator: String,
    /// Trajectory CSV destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Without --out: `json` prints the summary, `csv` prints the trajectory.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Loop JSON file (a `minimize` report is accepted too).
    #[arg(value_name = "LOOP_FILE")]
    file: PathBuf,
    /// Expected ring size; must match the file's `n` if given.
    #[arg(long)]
    n: Option<usize>,
    /// Quadrature nodes (default max(256, 8K)).
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long = "max-gradient", default_value_t = 1e-6)]
    max_gradient: f64,
    #[arg(long = "max-el-residual", default_value_t = 1e-4)]
    max_el_residual: f64,
    #[arg(long = "max-symmetry-violation", default_value_t = 1e-10)]
    max_symmetry_violation: f64,
    #[arg(long = "planarity-threshold", default_value_t = 1e-3)]
    planarity_threshold: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();

    let result = match cli.command {
        Command::Radius { n } => commands::radius(n),
        Command::Minimize(args) => commands::minimize(args),
        Command::Jacobi(args) => commands::jacobi(args),
        Command::Integrate(args) => commands::integrate(args),
        Command::Verify(args) => commands::verify(args),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {failure:#}");
            ExitCode::from(failure.exit_code())
        }
    }
}

pub(crate) fn min_grid(harmonics: usize) -> usize {
    OVERSAMPLING * harmonics
}
