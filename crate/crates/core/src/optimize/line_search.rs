use super::{dot, Objective};
use crate::error::Result;

/// Sufficient-decrease constant.
const ARMIJO_C1: f64 = 1e-4;
const SHRINK: f64 = 0.5;
const MAX_HALVINGS: usize = 60;

/// Result of an accepted backtracking step.
pub(crate) struct Accepted {
    pub alpha: f64,
    pub step: Vec<f64>,
}

/// Backtracking along `direction` until `f(x + α d) - f(x) ≤ c₁ α ∇f·d`.
///
/// Returns `None` if no step length down to `alpha0 · 2^-60` is accepted.
pub(crate) fn backtrack(
    objective: &dyn Objective,
    x: &[f64],
    gradient: &[f64],
    direction: &[f64],
    alpha0: f64,
) -> Result<Option<Accepted>> {
    let slope = dot(gradient, direction);
    debug_assert!(slope < 0.0);
    let mut alpha = alpha0;
    for _ in 0..MAX_HALVINGS {
        let step: Vec<f64> = direction.iter().map(|d| alpha * d).collect();
        let change = objective.difference(x, &step)?;
        if change.is_finite() && change <= ARMIJO_C1 * alpha * slope {
            return Ok(Some(Accepted { alpha, step }));
        }
        alpha *= SHRINK;
    }
    Ok(None)
}
