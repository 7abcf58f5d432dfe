//! The axial action
//!
//! ```text
//! f(z) = ∫₀¹ [ ż²/2 + N / √(r² + z²) ] dt
//! ```
//!
//! evaluated in coefficient space. The kinetic term is exact (Parseval); the
//! potential term uses the trapezoidal rule on `M ≥ 8K` uniform nodes, which
//! is spectrally accurate for smooth periodic integrands.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::geometry::CircularConfig;
use crate::loopspace::{random_loop, LoopPath, SymmetryClass, DEFAULT_MAX_HARMONIC};
use crate::optimize::{Minimizer, MinimizerRegistry, Objective, StopCriteria};
use crate::summation::CompensatedSum;

/// Quadrature nodes per harmonic.
pub const OVERSAMPLING: usize = 8;
/// Amplitude of random starting loops.
pub const DEFAULT_START_AMPLITUDE: f64 = 0.5;
/// Size of the kick along `sin(2πt)` applied to an exactly planar start.
pub const ZERO_START_PERTURBATION: f64 = 1e-3;
/// Actions closer than this (relative) count as tied.
pub const ACTION_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionEvaluation {
    pub value: f64,
    /// Interleaved `[∂f/∂a_1, ∂f/∂b_1, …]`, zero in slots the class forbids.
    pub gradient: Vec<f64>,
    pub gradient_norm: f64,
}

/// The action for one ring, class, truncation order and quadrature grid, with
/// the basis functions tabulated on the grid.
#[derive(Debug, Clone)]
pub struct ActionFunctional {
    config: CircularConfig,
    symmetry: SymmetryClass,
    max_harmonic: usize,
    grid: usize,
    /// `cos(2πk t_j)` at row `k - 1`.
    cos_table: Vec<Vec<f64>>,
    sin_table: Vec<Vec<f64>>,
    /// `(2πk)²` per harmonic.
    stiffness: Vec<f64>,
}

impl ActionFunctional {
    pub fn new(config: CircularConfig, symmetry: SymmetryClass, max_harmonic: usize, grid: usize) -> Result<Self> {
        if max_harmonic == 0 {
            return invalid("max_harmonic must be at least 1");
        }
        if grid < OVERSAMPLING * max_harmonic {
            return invalid(format!(
                "quadrature grid {grid} is below {OVERSAMPLING} x max_harmonic = {}",
                OVERSAMPLING * max_harmonic
            ));
        }
        let mut cos_table = Vec::with_capacity(max_harmonic);
        let mut sin_table = Vec::with_capacity(max_harmonic);
        for k in 1..=max_harmonic {
            let (c, s): (Vec<f64>, Vec<f64>) = (0..grid)
                .map(|j| {
                    // Reduce k·j modulo the grid in integers before scaling.
                    let theta = 2.0 * PI * ((k * j) % grid) as f64 / grid as f64;
                    let (s, c) = theta.sin_cos();
                    (c, s)
                })
                .unzip();
            cos_table.push(c);
            sin_table.push(s);
        }
        let stiffness = (1..=max_harmonic)
            .map(|k| (2.0 * PI * k as f64).powi(2))
            .collect();
        Ok(Self {
            config,
            symmetry,
            max_harmonic,
            grid,
            cos_table,
            sin_table,
            stiffness,
        })
    }

    pub fn for_loop(config: CircularConfig, path: &LoopPath, grid: usize) -> Result<Self> {
        Self::new(config, path.symmetry(), path.max_harmonic(), grid)
    }

    pub fn config(&self) -> &CircularConfig {
        &self.config
    }

    pub fn symmetry(&self) -> SymmetryClass {
        self.symmetry
    }

    pub fn max_harmonic(&self) -> usize {
        self.max_harmonic
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    fn check_loop(&self, path: &LoopPath) -> Result<()> {
        if path.symmetry() != self.symmetry || path.max_harmonic() != self.max_harmonic {
            return invalid(format!(
                "loop ({}, K = {}) does not match functional ({}, K = {})",
                path.symmetry(),
                path.max_harmonic(),
                self.symmetry,
                self.max_harmonic
            ));
        }
        Ok(())
    }

    fn check_coefficients(&self, coefficients: &[f64]) -> Result<()> {
        if coefficients.len() != 2 * self.max_harmonic {
            return invalid(format!(
                "coefficient vector has length {}, expected {}",
                coefficients.len(),
                2 * self.max_harmonic
            ));
        }
        Ok(())
    }

    /// `z(t_j)` on the grid.
    pub fn sample(&self, coefficients: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.grid];
        for k in 0..self.max_harmonic {
            let (a, b) = (coefficients[2 * k], coefficients[2 * k + 1]);
            if a != 0.0 {
                z.iter_mut().zip(&self.cos_table[k]).for_each(|(zi, c)| *zi += a * c);
            }
            if b != 0.0 {
                z.iter_mut().zip(&self.sin_table[k]).for_each(|(zi, s)| *zi += b * s);
            }
        }
        z
    }

    /// `Σ_k (2πk)²(a_k² + b_k²) / 4`.
    pub fn kinetic(&self, coefficients: &[f64]) -> f64 {
        0.25 * coefficients
            .chunks_exact(2)
            .zip(&self.stiffness)
            .map(|(ab, w2)| w2 * (ab[0] * ab[0] + ab[1] * ab[1]))
            .sum::<f64>()
    }

    /// Trapezoidal mean of `N / √(r² + z²)` over the grid samples.
    pub fn potential(&self, samples: &[f64]) -> f64 {
        let n = self.config.n() as f64;
        let r2 = self.config.radius().powi(2);
        let acc: CompensatedSum = samples.iter().map(|z| n / (r2 + z * z).sqrt()).collect();
        acc.value() / self.grid as f64
    }

    pub fn value(&self, coefficients: &[f64]) -> Result<f64> {
        self.check_coefficients(coefficients)?;
        Ok(self.kinetic(coefficients) + self.potential(&self.sample(coefficients)))
    }

    /// Value and class-projected gradient for an interleaved coefficient
    /// vector.
    pub fn value_and_gradient(&self, coefficients: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_coefficients(coefficients)?;
        let z = self.sample(coefficients);
        let value = self.kinetic(coefficients) + self.potential(&z);

        let n = self.config.n() as f64;
        let r2 = self.config.radius().powi(2);
        let inv_m = 1.0 / self.grid as f64;
        // dV/dz with V = N / √(r² + z²).
        let slope: Vec<f64> = z
            .iter()
            .map(|&z| {
                let d2 = r2 + z * z;
                -n * z / (d2 * d2.sqrt())
            })
            .collect();

        let mut gradient = vec![0.0; 2 * self.max_harmonic];
        for k in 0..self.max_harmonic {
            let kin = 0.5 * self.stiffness[k];
            if self.symmetry.allows_cosine(k + 1) {
                gradient[2 * k] = kin * coefficients[2 * k] + inv_m * dot(&slope, &self.cos_table[k]);
            }
            if self.symmetry.allows_sine(k + 1) {
                gradient[2 * k + 1] = kin * coefficients[2 * k + 1] + inv_m * dot(&slope, &self.sin_table[k]);
            }
        }
        Ok((value, gradient))
    }

    pub fn evaluate(&self, path: &LoopPath) -> Result<ActionEvaluation> {
        self.check_loop(path)?;
        let (value, gradient) = self.value_and_gradient(&path.coefficients())?;
        if !value.is_finite() {
            return Err(Error::NumericalFailure(format!("action evaluated to {value}")));
        }
        let gradient_norm = dot(&gradient, &gradient).sqrt();
        Ok(ActionEvaluation {
            value,
            gradient,
            gradient_norm,
        })
    }

    /// `f(x + step) - f(x)` evaluated without cancellation.
    pub fn difference(&self, coefficients: &[f64], step: &[f64]) -> Result<f64> {
        self.check_coefficients(coefficients)?;
        self.check_coefficients(step)?;
        let kinetic = 0.25
            * coefficients
                .chunks_exact(2)
                .zip(step.chunks_exact(2))
                .zip(&self.stiffness)
                .map(|((x, s), w2)| w2 * (s[0] * (2.0 * x[0] + s[0]) + s[1] * (2.0 * x[1] + s[1])))
                .sum::<f64>();
        let z = self.sample(coefficients);
        let w = self.sample(step);
        let n = self.config.n() as f64;
        let r2 = self.config.radius().powi(2);
        // 1/√A' - 1/√A = (A - A') / (√A √A' (√A + √A')), A - A' = -w(2z + w).
        let acc: CompensatedSum = z
            .iter()
            .zip(&w)
            .map(|(&z, &w)| {
                let ra = (r2 + z * z).sqrt();
                let rb = (r2 + (z + w) * (z + w)).sqrt();
                -n * w * (2.0 * z + w) / (ra * rb * (ra + rb))
            })
            .collect();
        Ok(kinetic + acc.value() / self.grid as f64)
    }

    /// Second derivative of the action applied to `direction`.
    ///
    /// `direction` is an interleaved coefficient vector and must lie in the
    /// loop's symmetry class.
    pub fn hessian_vector(&self, path: &LoopPath, direction: &[f64]) -> Result<Vec<f64>> {
        self.check_loop(path)?;
        self.check_coefficients(direction)?;
        if let Some(i) = (0..direction.len()).find(|&i| direction[i] != 0.0 && !self.symmetry.allows_slot(i)) {
            return invalid(format!(
                "direction has a nonzero {} component at k = {} outside {}",
                if i % 2 == 0 { "cosine" } else { "sine" },
                i / 2 + 1,
                self.symmetry
            ));
        }
        let z = self.sample(&path.coefficients());
        let w = self.sample(direction);
        let n = self.config.n() as f64;
        let r2 = self.config.radius().powi(2);
        let inv_m = 1.0 / self.grid as f64;
        // V''(z) w(t) with V'' = N (2z² - r²) / (r² + z²)^{5/2}.
        let curvature: Vec<f64> = z
            .iter()
            .zip(&w)
            .map(|(&z, &w)| {
                let d2 = r2 + z * z;
                n * (2.0 * z * z - r2) / (d2 * d2 * d2.sqrt()) * w
            })
            .collect();
        let mut out = vec![0.0; direction.len()];
        for k in 0..self.max_harmonic {
            let kin = 0.5 * self.stiffness[k];
            if self.symmetry.allows_cosine(k + 1) {
                out[2 * k] = kin * direction[2 * k] + inv_m * dot(&curvature, &self.cos_table[k]);
            }
            if self.symmetry.allows_sine(k + 1) {
                out[2 * k + 1] = kin * direction[2 * k + 1] + inv_m * dot(&curvature, &self.sin_table[k]);
            }
        }
        Ok(out)
    }

    /// `max_j |z(t_j)|` over the grid.
    pub fn amplitude(&self, path: &LoopPath) -> f64 {
        self.sample(&path.coefficients())
            .iter()
            .fold(0.0, |m, z| m.max(z.abs()))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn action(config: &CircularConfig, path: &LoopPath, grid: usize) -> Result<ActionEvaluation> {
    ActionFunctional::for_loop(*config, path, grid)?.evaluate(path)
}

pub fn hessian_vector(config: &CircularConfig, path: &LoopPath, direction: &[f64], grid: usize) -> Result<Vec<f64>> {
    ActionFunctional::for_loop(*config, path, grid)?.hessian_vector(path, direction)
}

/// The action restricted to the free coefficients of its symmetry class.
struct ReducedAction<'a> {
    functional: &'a ActionFunctional,
    free: Vec<usize>,
}

impl ReducedAction<'_> {
    fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; 2 * self.functional.max_harmonic()];
        for (&slot, &v) in self.free.iter().zip(x) {
            full[slot] = v;
        }
        full
    }

    fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&i| full[i]).collect()
    }
}

impl Objective for ReducedAction<'_> {
    fn dim(&self) -> usize {
        self.free.len()
    }

    fn value_and_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (f, g) = self.functional.value_and_gradient(&self.expand(x))?;
        Ok((f, self.restrict(&g)))
    }

    fn difference(&self, x: &[f64], step: &[f64]) -> Result<f64> {
        self.functional.difference(&self.expand(x), &self.expand(step))
    }
}

/// Where a minimization starts.
#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    /// [`random_loop`] with the given seed and amplitude.
    Random { seed: u64, amplitude: f64 },
    /// The planar loop `z ≡ 0`.
    Zero,
    /// An explicit loop, resized to the run's truncation order.
    Loop(LoopPath),
}

impl Start {
    pub fn seeded(seed: u64) -> Self {
        Start::Random {
            seed,
            amplitude: DEFAULT_START_AMPLITUDE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeSettings {
    pub symmetry: SymmetryClass,
    pub max_harmonic: usize,
    pub grid: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Kick an exactly planar start along `sin(2πt)`.
    pub perturb: bool,
}

impl MinimizeSettings {
    pub fn new(symmetry: SymmetryClass, max_harmonic: usize) -> Self {
        Self {
            symmetry,
            max_harmonic,
            grid: OVERSAMPLING * max_harmonic,
            tolerance: 1e-8,
            max_iterations: 5000,
            perturb: true,
        }
    }
}

impl Default for MinimizeSettings {
    fn default() -> Self {
        Self::new(SymmetryClass::Lambda1, DEFAULT_MAX_HARMONIC)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeResult {
    pub loop_path: LoopPath,
    pub action: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    /// `max |z|` on the quadrature grid.
    pub amplitude: f64,
    pub converged: bool,
    /// Action at the start and after each accepted iteration.
    pub history: Vec<f64>,
}

fn start_loop(settings: &MinimizeSettings, start: &Start) -> Result<LoopPath> {
    let path = match start {
        Start::Random { seed, amplitude } => {
            random_loop(settings.symmetry, settings.max_harmonic, *amplitude, *seed)?
        }
        Start::Zero => LoopPath::zero(settings.symmetry, settings.max_harmonic),
        Start::Loop(path) => {
            if path.symmetry() != settings.symmetry {
                return invalid(format!(
                    "start loop is in {} but the run is in {}",
                    path.symmetry(),
                    settings.symmetry
                ));
            }
            path.resized(settings.max_harmonic)
        }
    };
    if path.is_zero() && settings.perturb {
        // Zero is a critical point; step off it along the k = 1 sine mode.
        return Ok(path.with_sine_offset(1, ZERO_START_PERTURBATION));
    }
    Ok(path)
}

/// Minimize the action within one symmetry class from a single start.
pub fn minimize(
    config: &CircularConfig,
    settings: &MinimizeSettings,
    start: &Start,
    minimizer: &dyn Minimizer,
) -> Result<MinimizeResult> {
    if !(settings.tolerance > 0.0) {
        return invalid(format!("tolerance must be positive, got {}", settings.tolerance));
    }
    let functional = ActionFunctional::new(*config, settings.symmetry, settings.max_harmonic, settings.grid)?;
    let initial = start_loop(settings, start)?;
    let reduced = ReducedAction {
        functional: &functional,
        free: settings.symmetry.free_slots(settings.max_harmonic),
    };
    let stop = StopCriteria {
        tolerance: settings.tolerance,
        max_iterations: settings.max_iterations,
    };
    let outcome = minimizer.minimize(&reduced, reduced.restrict(&initial.coefficients()), &stop)?;
    if !outcome.value.is_finite() {
        return Err(Error::NumericalFailure(format!("action evaluated to {}", outcome.value)));
    }
    let loop_path = LoopPath::from_coefficients(settings.symmetry, &reduced.expand(&outcome.x))?;
    let amplitude = functional.amplitude(&loop_path);
    Ok(MinimizeResult {
        loop_path,
        action: outcome.value,
        gradient_norm: outcome.gradient_norm,
        iterations: outcome.iterations,
        amplitude,
        converged: outcome.converged,
        history: outcome.history,
    })
}

/// One start of a multi-start run.
#[derive(Debug, Clone, PartialEq)]
pub struct StartOutcome {
    pub start: Start,
    pub result: MinimizeResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiStartResult {
    pub best: MinimizeResult,
    pub starts: Vec<StartOutcome>,
}

/// Runs every start (concurrently) and returns the lowest action. Ties within
/// [`ACTION_TIE_TOLERANCE`] go to the smaller Sobolev norm, then to the
/// earlier start, so the choice never depends on scheduling.
pub fn minimize_multistart(
    config: &CircularConfig,
    settings: &MinimizeSettings,
    starts: &[Start],
    minimizer: &dyn Minimizer,
) -> Result<MultiStartResult> {
    if starts.is_empty() {
        return invalid("at least one start is required");
    }
    let results: Vec<Result<MinimizeResult>> = starts
        .par_iter()
        .map(|s| minimize(config, settings, s, minimizer))
        .collect();
    let mut outcomes = Vec::with_capacity(starts.len());
    for (start, result) in starts.iter().zip(results) {
        let result = result?;
        log::info!(
            "start {:?}: action = {}, |grad| = {:e}, iterations = {}, amplitude = {}, converged = {}",
            start,
            result.action,
            result.gradient_norm,
            result.iterations,
            result.amplitude,
            result.converged
        );
        outcomes.push(StartOutcome {
            start: start.clone(),
            result,
        });
    }
    let mut best = &outcomes[0].result;
    for o in &outcomes[1..] {
        let r = &o.result;
        let tol = ACTION_TIE_TOLERANCE * best.action.abs().max(1.0);
        if r.action < best.action - tol
            || ((r.action - best.action).abs() <= tol && r.loop_path.sobolev_norm() < best.loop_path.sobolev_norm())
        {
            best = r;
        }
    }
    Ok(MultiStartResult {
        best: best.clone(),
        starts: outcomes,
    })
}

/// Multi-start with seeded random starts and the named optimizer.
pub fn minimize_seeds(
    config: &CircularConfig,
    settings: &MinimizeSettings,
    seeds: &[u64],
    optimizer: &str,
) -> Result<MultiStartResult> {
    let registry = MinimizerRegistry::default();
    let starts: Vec<Start> = seeds.iter().map(|&s| Start::seeded(s)).collect();
    minimize_multistart(config, settings, &starts, registry.get(optimizer)?)
}
