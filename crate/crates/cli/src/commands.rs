use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use ringorbit_core::action::{action, minimize_multistart, MinimizeSettings, Start};
use ringorbit_core::dynamics::{
    el_residual, energy_drift_max, integrate_with, linear_period, measured_period, StepperRegistry,
    TrajectorySample,
};
use ringorbit_core::geometry::{build_config, lemma27_check, ring_residual, Lemma27Check};
use ringorbit_core::io::{write_scan_csv, write_trajectory_csv, LoopDocument, MinimizeDocument};
use ringorbit_core::jacobi::{analyze, saddle_scan};
use ringorbit_core::loopspace::{LoopPath, SymmetryClass};
use ringorbit_core::optimize::MinimizerRegistry;
use serde::Serialize;

use crate::output::{print_json, write_atomic, write_json_file};
use crate::{min_grid, IntegrateArgs, JacobiArgs, MinimizeArgs, StartKind, VerifyArgs, Format};

/// Samples used for the ring force-balance residual in `radius`.
const RING_SAMPLES: usize = 16;

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or input files.
    Input(String),
    /// Computation finished but did not converge, or failed numerically.
    Numerical(String),
    Io(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Numerical(m) => f.write_str(m),
            Failure::Io(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<ringorbit_core::Error> for Failure {
    fn from(e: ringorbit_core::Error) -> Self {
        match e {
            ringorbit_core::Error::NumericalFailure(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.into())
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn input<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Input(msg.into()))
}

#[derive(Serialize)]
struct RadiusReport {
    n: usize,
    csc_sum: f64,
    radius: f64,
    ring_residual_max: f64,
    lemma27: Lemma27Check,
}

pub fn radius(n: usize) -> CmdResult {
    let config = build_config(n)?;
    let report = RadiusReport {
        n,
        csc_sum: config.csc_sum(),
        radius: config.radius(),
        ring_residual_max: ring_residual(&config, 0.0, RING_SAMPLES)?,
        lemma27: lemma27_check(n)?,
    };
    print_json(&report)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct MinimizeReport {
    #[serde(flatten)]
    result: MinimizeDocument,
    el_residual: f64,
    action_of_zero_loop: f64,
    is_nonplanar: bool,
}

pub fn minimize(args: MinimizeArgs) -> CmdResult {
    let config = build_config(args.n)?;
    if args.harmonics == 0 {
        return input("--harmonics must be at least 1");
    }
    let grid = args.grid.unwrap_or(min_grid(args.harmonics));
    if grid < min_grid(args.harmonics) {
        return input(format!(
            "--grid {grid} is below 8 x harmonics = {}",
            min_grid(args.harmonics)
        ));
    }
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return input(format!("--tol must be positive, got {}", args.tol));
    }
    if !(args.planarity_threshold >= 0.0) {
        return input("--planarity-threshold must be non-negative");
    }
    if args.seeds.is_empty() && args.start == StartKind::Random {
        return input("at least one --seed is required");
    }
    let registry = MinimizerRegistry::default();
    let optimizer = registry.get(&args.optimizer)?;

    let symmetry: SymmetryClass = args.space.into();
    let settings = MinimizeSettings {
        symmetry,
        max_harmonic: args.harmonics,
        grid,
        tolerance: args.tol,
        max_iterations: args.max_iter,
        perturb: !args.no_perturb,
    };
    let starts: Vec<Start> = match args.start {
        StartKind::Zero => vec![Start::Zero],
        StartKind::Random => args.seeds.iter().map(|&s| Start::seeded(s)).collect(),
    };
    let run = minimize_multistart(&config, &settings, &starts, optimizer)?;
    let best = &run.best;
    let zero = LoopPath::zero(symmetry, args.harmonics);
    let report = MinimizeReport {
        result: MinimizeDocument::new(args.n, best),
        el_residual: el_residual(&config, &best.loop_path, grid)?,
        action_of_zero_loop: action(&config, &zero, grid)?.value,
        is_nonplanar: best.amplitude > args.planarity_threshold,
    };
    if let Some(path) = &args.out {
        write_json_file(path, &LoopDocument::from_loop(args.n, &best.loop_path))?;
    }
    print_json(&report)?;
    if best.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "not converged: gradient norm {:e} > {:e} after {} iterations",
            best.gradient_norm, args.tol, best.iterations
        );
        Ok(ExitCode::from(3))
    }
}

fn parse_range(text: &str) -> Result<(usize, usize), Failure> {
    let Some((a, b)) = text.split_once(':') else {
        return input(format!("--scan expects a:b, got '{text}'"));
    };
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Failure::Input(format!("--scan bound '{s}' is not a non-negative integer")))
    };
    Ok((parse(a)?, parse(b)?))
}

#[derive(Serialize)]
struct ScanSummary {
    n_min: usize,
    n_max: usize,
    rows: usize,
    crossings: usize,
    n_star: Option<usize>,
}

pub fn jacobi(args: JacobiArgs) -> CmdResult {
    if let Some(n) = args.n {
        if args.out.is_some() {
            return input("--out applies to --scan only");
        }
        let report = analyze(&build_config(n)?)?;
        print_json(&report)?;
        return Ok(ExitCode::SUCCESS);
    }
    let range = args.scan.as_deref().expect("clap requires --n or --scan");
    let (n_min, n_max) = parse_range(range)?;
    let scan = saddle_scan(n_min, n_max)?;
    let summary = ScanSummary {
        n_min,
        n_max,
        rows: scan.entries.len(),
        crossings: scan.crossings(),
        n_star: scan.n_star,
    };
    match &args.out {
        Some(path) => {
            write_atomic(path, |w| write_scan_csv(w, &scan.entries))?;
            print_json(&summary)?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_scan_csv(&mut lock, &scan.entries)?;
            lock.flush()?;
            match summary.n_star {
                Some(n) => eprintln!("n_star = {n}"),
                None => eprintln!("n_star = none"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct IntegrateSummary {
    energy_drift_max: f64,
    final_state: TrajectorySample,
    measured_period: Option<f64>,
    linear_period: f64,
}

pub fn integrate(args: IntegrateArgs) -> CmdResult {
    let config = build_config(args.n)?;
    if !(args.dt > 0.0 && args.dt.is_finite()) {
        return input(format!("--dt must be positive, got {}", args.dt));
    }
    if args.steps == 0 {
        return input("--steps must be at least 1");
    }
    if !(args.z0.is_finite() && args.v0.is_finite()) {
        return input("--z0 and --v0 must be finite");
    }
    let registry = StepperRegistry::default();
    let stepper = registry.get(&args.integrator)?;
    let samples = integrate_with(stepper, &config, args.z0, args.v0, args.dt, args.steps)?;
    let summary = IntegrateSummary {
        energy_drift_max: energy_drift_max(&samples),
        final_state: *samples.last().expect("at least one sample"),
        measured_period: measured_period(&samples),
        linear_period: linear_period(&config),
    };
    match (&args.out, args.format) {
        (Some(path), _) => {
            write_atomic(path, |w| write_trajectory_csv(w, &samples))?;
            print_json(&summary)?;
        }
        (None, Format::Json) => print_json(&summary)?,
        (None, Format::Csv) => {
            let stdout = io::stdout();
            let mut lock = io::BufWriter::new(stdout.lock());
            write_trajectory_csv(&mut lock, &samples)?;
            lock.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct VerifyReport {
    n: usize,
    space: SymmetryClass,
    action: f64,
    gradient_norm: f64,
    el_residual: f64,
    symmetry_violation_max: f64,
    poincare_wirtinger_ratio: Option<f64>,
    amplitude: f64,
    passed: bool,
}

pub fn verify(args: VerifyArgs) -> CmdResult {
    let text = fs::read_to_string(&args.file)
        .map_err(|e| Failure::Input(format!("reading {}: {e}", args.file.display())))?;
    let doc = LoopDocument::parse(&text)?;
    let path = doc.to_loop()?;
    if let Some(n) = args.n {
        if n != doc.n {
            return input(format!("--n {n} does not match the file's n = {}", doc.n));
        }
    }
    let config = build_config(doc.n)?;
    let k = path.max_harmonic();
    let grid = args.grid.unwrap_or(min_grid(k).max(256));
    if grid < min_grid(k) {
        return input(format!("--grid {grid} is below 8 x K = {}", min_grid(k)));
    }
    let eval = action(&config, &path, grid)?;
    let el = el_residual(&config, &path, grid)?;
    let symmetry = path.symmetry_violation(grid);
    let ratio = path.poincare_wirtinger_ratio();
    let amplitude = (0..grid)
        .map(|j| path.evaluate(j as f64 / grid as f64).0.abs())
        .fold(0.0, f64::max);
    let passed = eval.gradient_norm <= args.max_gradient
        && el <= args.max_el_residual
        && symmetry <= args.max_symmetry_violation
        && ratio.is_none_or(|r| r >= 1.0);
    print_json(&VerifyReport {
        n: doc.n,
        space: path.symmetry(),
        action: eval.value,
        gradient_norm: eval.gradient_norm,
        el_residual: el,
        symmetry_violation_max: symmetry,
        poincare_wirtinger_ratio: ratio,
        amplitude,
        passed,
    })?;
    if amplitude <= args.planarity_threshold {
        eprintln!(
            "warning: loop amplitude {amplitude:e} is at or below the planarity threshold {:e}",
            args.planarity_threshold
        );
    }
    if passed {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("verification failed");
        Ok(ExitCode::from(3))
    }
}
