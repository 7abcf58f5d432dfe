use std::collections::VecDeque;

use super::line_search::backtrack;
use super::{check_finite, check_start, dot, norm, Minimizer, Objective, Outcome, StopCriteria};
use crate::error::Result;

/// Limited-memory BFGS (two-loop recursion) with backtracking.
#[derive(Debug, Clone)]
pub struct Lbfgs {
    pub memory: usize,
}

impl Default for Lbfgs {
    fn default() -> Self {
        Self { memory: 10 }
    }
}

impl Minimizer for Lbfgs {
    fn name(&self) -> &'static str {
        "lbfgs"
    }

    fn description(&self) -> &'static str {
        "limited-memory BFGS, two-loop recursion"
    }

    fn minimize(&self, objective: &dyn Objective, x0: Vec<f64>, stop: &StopCriteria) -> Result<Outcome> {
        check_start(objective, &x0, stop)?;
        let mut x = x0;
        let (mut f, mut g) = objective.value_and_gradient(&x)?;
        check_finite(f, &g)?;
        let mut history = vec![f];
        let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
        let mut iterations = 0;

        while norm(&g) > stop.tolerance && iterations < stop.max_iterations {
            let mut d = two_loop(&pairs, &g);
            if dot(&d, &g) >= 0.0 {
                pairs.clear();
                d = g.iter().map(|v| -v).collect();
            }
            let alpha0 = if pairs.is_empty() { (1.0 / norm(&d)).min(1.0) } else { 1.0 };
            let accepted = match backtrack(objective, &x, &g, &d, alpha0)? {
                Some(a) => a,
                None if !pairs.is_empty() => {
                    pairs.clear();
                    let d: Vec<f64> = g.iter().map(|v| -v).collect();
                    match backtrack(objective, &x, &g, &d, (1.0 / norm(&d)).min(1.0))? {
                        Some(a) => a,
                        None => break,
                    }
                }
                None => break,
            };
            let x_new: Vec<f64> = x.iter().zip(&accepted.step).map(|(a, b)| a + b).collect();
            let (f_new, g_new) = objective.value_and_gradient(&x_new)?;
            check_finite(f_new, &g_new)?;
            let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&accepted.step, &y);
            if sy > 1e-300 {
                if pairs.len() == self.memory.max(1) {
                    pairs.pop_front();
                }
                pairs.push_back((accepted.step, y, 1.0 / sy));
            }
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

fn two_loop(pairs: &VecDeque<(Vec<f64>, Vec<f64>, f64)>, g: &[f64]) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(pairs.len());
    for (s, y, rho) in pairs.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((s, y, _)) = pairs.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in pairs.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}
