//! The regular N-gon of unit masses rotating rigidly with period 1.
//!
//! Units: `G = 1`, `m_i = 1`, period `T = 1`, angular frequency `2π`.
//! Primary positions are never stored; they are evaluated from the closed form
//! `q_j(t) = r·exp(i·2π(t + j/N))`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::summation::CompensatedSum;

/// Relative tolerance used by [`lemma27_check`].
pub const LEMMA27_TOLERANCE: f64 = 1e-9;

/// `csc(π·j/n)` evaluated through the reflected index `min(j, n - j)` so the
/// sine argument stays in `(0, π/2]`, where it is computed to full relative
/// precision.
#[inline]
fn csc_term(j: usize, n: usize) -> f64 {
    let m = j.min(n - j);
    1.0 / (PI * m as f64 / n as f64).sin()
}

fn check_count(n: usize) -> Result<()> {
    if n < 2 {
        return invalid(format!("the ring needs at least 2 primaries, got n = {n}"));
    }
    Ok(())
}

/// `Σ_{j=1}^{n-1} csc(πj/n)`, compensated, smallest terms first.
pub fn csc_sum(n: usize) -> Result<f64> {
    check_count(n)?;
    let mut acc = CompensatedSum::new();
    // m = min(j, n-j) runs from n/2 (smallest term) down to 1 (largest).
    for m in (1..=n / 2).rev() {
        let term = csc_term(m, n);
        acc.add(term);
        if 2 * m != n {
            acc.add(term);
        }
    }
    Ok(acc.value())
}

/// Plain left-to-right summation of the same terms, `j = 1, …, n-1`.
///
/// Kept as a cross-check for [`csc_sum`].
pub fn csc_sum_direct(n: usize) -> Result<f64> {
    check_count(n)?;
    Ok((1..n).map(|j| csc_term(j, n)).sum())
}

/// Circular relative equilibrium of `n` unit masses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircularConfig {
    n: usize,
    radius: f64,
    csc_sum: f64,
}

impl CircularConfig {
    /// Ring radius `r = (1/(4π))^{2/3} · (Σ csc(πj/n))^{1/3}`.
    pub fn build(n: usize) -> Result<Self> {
        let csc_sum = csc_sum(n)?;
        let radius = (1.0 / (4.0 * PI)).powf(2.0 / 3.0) * csc_sum.cbrt();
        Ok(Self { n, radius, csc_sum })
    }

    /// Same ring with its radius replaced. The result no longer satisfies the
    /// force balance; it exists so that residual checks can be exercised on
    /// a deliberately wrong configuration.
    pub fn with_radius(self, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return invalid(format!("radius must be positive and finite, got {radius}"));
        }
        Ok(Self { radius, ..self })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn csc_sum(&self) -> f64 {
        self.csc_sum
    }

    /// `N / r³`, the squared frequency of small axial oscillations.
    pub fn stiffness(&self) -> f64 {
        self.n as f64 / self.radius.powi(3)
    }

    /// Planar position of primary `j` (1-based, `j = n` sits on the x-axis at
    /// `t = 0`).
    pub fn position(&self, j: usize, t: f64) -> [f64; 2] {
        let phase = (t + j as f64 / self.n as f64).rem_euclid(1.0);
        let (s, c) = (2.0 * PI * phase).sin_cos();
        [self.radius * c, self.radius * s]
    }
}

pub fn build_config(n: usize) -> Result<CircularConfig> {
    CircularConfig::build(n)
}

/// Largest violation of `q̈_i = ∂U/∂q_i` over primaries and over the sample
/// times `t + s/samples`, `s = 0, …, samples - 1`.
///
/// Accelerations use the analytic `q̈_i = -4π² q_i`; forces are summed
/// pairwise over the ring.
pub fn ring_residual(config: &CircularConfig, t: f64, samples: usize) -> Result<f64> {
    if samples == 0 {
        return invalid("ring_residual needs at least one sample");
    }
    let n = config.n();
    let omega_sq = 4.0 * PI * PI;
    let mut worst = 0.0_f64;
    for s in 0..samples {
        let ts = t + s as f64 / samples as f64;
        let positions: Vec<[f64; 2]> = (1..=n).map(|j| config.position(j, ts)).collect();
        for (i, qi) in positions.iter().enumerate() {
            let mut force = [0.0; 2];
            for (j, qj) in positions.iter().enumerate() {
                if i == j {
                    continue;
                }
                let dx = qj[0] - qi[0];
                let dy = qj[1] - qi[1];
                let d2 = dx * dx + dy * dy;
                let inv3 = 1.0 / (d2 * d2.sqrt());
                force[0] += dx * inv3;
                force[1] += dy * inv3;
            }
            let ex = -omega_sq * qi[0] - force[0];
            let ey = -omega_sq * qi[1] - force[1];
            worst = worst.max(ex.hypot(ey));
        }
    }
    Ok(worst)
}

/// Numerical status of the identity `Σ csc(πj/N) = 4/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma27Check {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Compares the directly summed cosecant sum with `4/n`. Reports, never assumes.
pub fn lemma27_check(n: usize) -> Result<Lemma27Check> {
    let lhs = csc_sum(n)?;
    let rhs = 4.0 / n as f64;
    let holds = (lhs - rhs).abs() <= LEMMA27_TOLERANCE * rhs.abs().max(1.0);
    Ok(Lemma27Check { lhs, rhs, holds })
}
