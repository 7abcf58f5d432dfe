use super::line_search::backtrack;
use super::{check_finite, check_start, norm, Minimizer, Objective, Outcome, StopCriteria};
use crate::error::Result;

/// Gradient descent with an adaptive backtracking step. Slow, but a useful
/// baseline against the quasi-Newton methods.
#[derive(Debug, Clone, Default)]
pub struct SteepestDescent;

impl Minimizer for SteepestDescent {
    fn name(&self) -> &'static str {
        "steepest"
    }

    fn description(&self) -> &'static str {
        "steepest descent with adaptive backtracking"
    }

    fn minimize(&self, objective: &dyn Objective, x0: Vec<f64>, stop: &StopCriteria) -> Result<Outcome> {
        check_start(objective, &x0, stop)?;
        let mut x = x0;
        let (mut f, mut g) = objective.value_and_gradient(&x)?;
        check_finite(f, &g)?;
        let mut history = vec![f];
        let mut alpha = (1.0 / norm(&g).max(f64::MIN_POSITIVE)).min(1.0);
        let mut iterations = 0;

        while norm(&g) > stop.tolerance && iterations < stop.max_iterations {
            let d: Vec<f64> = g.iter().map(|v| -v).collect();
            let Some(accepted) = backtrack(objective, &x, &g, &d, alpha)? else {
                break;
            };
            x.iter_mut().zip(&accepted.step).for_each(|(a, b)| *a += b);
            let (f_new, g_new) = objective.value_and_gradient(&x)?;
            check_finite(f_new, &g_new)?;
            f = f_new;
            g = g_new;
            history.push(f);
            alpha = accepted.alpha * 2.0;
            iterations += 1;
        }

        let gradient_norm = norm(&g);
        Ok(Outcome {
            x,
            value: f,
            gradient_norm,
            iterations,
            converged: gradient_norm <= stop.tolerance,
            history,
        })
    }
}
