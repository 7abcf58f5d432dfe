use super::line_search::backtrack;
use super::{check_finite, check_start, dot, norm, Minimizer, Objective, Outcome, StopCriteria};
use crate::error::Result;

/// Dense inverse-Hessian BFGS with backtracking line search.
///
/// The inverse Hessian is rescaled by `sᵀy / yᵀy` after the first step and
/// the update is skipped whenever the curvature condition `sᵀy > 0` fails.
#[derive(Debug, Clone)]
pub struct Bfgs {
    /// Cap on the length of the very first trial step.
    pub initial_step: f64,
}

impl Default for Bfgs {
    fn default() -> Self {
        Self { initial_step: 1.0 }
    }
}

impl Minimizer for Bfgs {
    fn name(&self) -> &'static str {
        "bfgs"
    }

    fn description(&self) -> &'static str {
        "dense BFGS quasi-Newton with Armijo backtracking"
    }

    fn minimize(&self, objective: &dyn Objective, x0: Vec<f64>, stop: &StopCriteria) -> Result<Outcome> {
        check_start(objective, &x0, stop)?;
        let n = x0.len();
        let mut x = x0;
        let (mut f, mut g) = objective.value_and_gradient(&x)?;
        check_finite(f, &g)?;
        let mut history = vec![f];
        let mut h = identity(n);
        let mut first = true;
        let mut iterations = 0;

        while norm(&g) > stop.tolerance && iterations < stop.max_iterations {
            let mut d = mat_vec(&h, &g);
            d.iter_mut().for_each(|v| *v = -*v);
            if dot(&d, &g) >= 0.0 {
                h = identity(n);
                d = g.iter().map(|v| -v).collect();
            }
            let alpha0 = if first {
                (self.initial_step / norm(&d)).min(1.0)
            } else {
                1.0
            };
            let accepted = match backtrack(objective, &x, &g, &d, alpha0)? {
                Some(a) => a,
                None if !is_identity(&h) => {
                    // Stale curvature; retry once along the gradient.
                    h = identity(n);
                    let d: Vec<f64> = g.iter().map(|v| -v).collect();
                    let a0 = (self.initial_step / norm(&d)).min(1.0);
                    match backtrack(objective, &x, &g, &d, a0)? {
                        Some(a) => a,
                        None => break,
                    }
                }
                None => break,
            };
            let x_new: Vec<f64> = x.iter().zip(&accepted.step).map(|(a, b)| a + b).collect();
            let (f_new, g_new) = objective.value_and_gradient(&x_new)?;
            check_finite(f_new, &g_new)?;
            let s = accepted.step;
            let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 1e-300 {
                if first {
                    let scale = sy / dot(&y, &y);
                    h.iter_mut().flatten().for_each(|v| *v *= scale);
                }
                bfgs_update(&mut h, &s, &y, sy);
                first = false;
            }
            log::trace!("bfgs iter {iterations}: f = {f_new:e}, |g| = {:e}, alpha = {:e}", norm(&g_new), accepted.alpha);
            x = x_new;
            f = f_new;
            g = g_new;
            history.push(f);
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

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn is_identity(h: &[Vec<f64>]) -> bool {
    h.iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, &v)| v == if i == j { 1.0 } else { 0.0 }))
}

fn mat_vec(h: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    h.iter().map(|row| dot(row, v)).collect()
}

/// `H ← (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ`, `ρ = 1 / sᵀy`.
fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let rho = 1.0 / sy;
    let hy = mat_vec(h, y);
    let yhy = dot(y, &hy);
    let n = s.len();
    for i in 0..n {
        for j in 0..n {
            h[i][j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
        }
    }
}
