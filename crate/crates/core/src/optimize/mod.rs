//! Unconstrained smooth minimizers, selectable by name.
//!
//! Every strategy implements [`Minimizer`] and is looked up through a
//! [`MinimizerRegistry`]. The default registry holds `bfgs` (the default),
//! `lbfgs` and `steepest`.

mod bfgs;
mod lbfgs;
mod line_search;
mod steepest;

pub use bfgs::Bfgs;
pub use lbfgs::Lbfgs;
pub use steepest::SteepestDescent;

use crate::error::{invalid, Result};

/// A smooth objective in `R^dim`.
pub trait Objective {
    fn dim(&self) -> usize;

    fn value_and_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)>;

    /// `f(x + step) - f(x)`.
    ///
    /// Objectives that can evaluate the difference without cancellation
    /// should override this; line searches only ever test decreases through
    /// it.
    fn difference(&self, x: &[f64], step: &[f64]) -> Result<f64> {
        let moved: Vec<f64> = x.iter().zip(step).map(|(a, b)| a + b).collect();
        Ok(self.value_and_gradient(&moved)?.0 - self.value_and_gradient(x)?.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopCriteria {
    /// Stop once the gradient 2-norm is at most this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for StopCriteria {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value at the start and after every accepted iteration.
    pub history: Vec<f64>,
}

pub trait Minimizer: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn minimize(&self, objective: &dyn Objective, x0: Vec<f64>, stop: &StopCriteria) -> Result<Outcome>;
}

pub struct MinimizerRegistry {
    entries: Vec<Box<dyn Minimizer>>,
}

impl MinimizerRegistry {
    pub const DEFAULT: &'static str = "bfgs";

    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    /// Registers a strategy, replacing any existing entry with the same name.
    pub fn register(mut self, minimizer: Box<dyn Minimizer>) -> Self {
        self.entries.retain(|m| m.name() != minimizer.name());
        self.entries.push(minimizer);
        self
    }

    pub fn get(&self, name: &str) -> Result<&dyn Minimizer> {
        match self.entries.iter().find(|m| m.name() == name) {
            Some(m) => Ok(m.as_ref()),
            None => invalid(format!(
                "unknown optimizer '{name}' (available: {})",
                self.names().join(", ")
            )),
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|m| m.name()).collect()
    }
}

impl Default for MinimizerRegistry {
    fn default() -> Self {
        Self::empty()
            .register(Box::new(Bfgs::default()))
            .register(Box::new(Lbfgs::default()))
            .register(Box::new(SteepestDescent))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn check_start(objective: &dyn Objective, x0: &[f64], stop: &StopCriteria) -> Result<()> {
    if x0.len() != objective.dim() {
        return invalid(format!(
            "start has dimension {}, objective expects {}",
            x0.len(),
            objective.dim()
        ));
    }
    if !(stop.tolerance > 0.0) {
        return invalid(format!("tolerance must be positive, got {}", stop.tolerance));
    }
    Ok(())
}

pub(crate) fn check_finite(value: f64, gradient: &[f64]) -> Result<()> {
    if !value.is_finite() || gradient.iter().any(|g| !g.is_finite()) {
        return Err(crate::Error::NumericalFailure(
            "objective or gradient is not finite".into(),
        ));
    }
    Ok(())
}
