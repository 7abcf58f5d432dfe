//! Second variation of the action at the planar loop `z ≡ 0`.
//!
//! With `F(z, z') = z'²/2 + N/√(r² + z²)` the coefficients at `z = 0` are
//! `P = 1/2` and `Q = -N/(2r³)`, so the Jacobi equation is
//! `h'' + (N/r³) h = 0`. Its solution with `h(0) = 0, h'(0) = 1` vanishes
//! first at `c = π √(r³/N) = (1/4) √(Σ csc(πj/N) / N)`. When `c < 1/2` the
//! planar loop has a conjugate point inside the half period and cannot be a
//! minimizer in either symmetry class.
//!
//! The report also records the values one obtains by assuming
//! `Σ csc(πj/N) = 4/N` (`c = 1/(2N)`, `h(1/2) = 0`) together with flags saying
//! whether direct evaluation confirms them.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::geometry::{build_config, lemma27_check, CircularConfig};

/// Relative tolerance used when comparing a computed quantity with a claimed
/// closed-form value.
pub const CLAIM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiReport {
    pub n: usize,
    pub p_coeff: f64,
    pub q_coeff: f64,
    pub omega: f64,
    pub conjugate_point: f64,
    /// `h(1/2)` for the normalized solution.
    pub half_period_value: f64,
    pub zero_loop_is_saddle: bool,
    /// `c = 1/(2N)`, the conjugate point implied by the `4/N` identity.
    pub paper_c_claim: f64,
    pub paper_c_claim_holds: bool,
    /// `ω/2 = Nπ`, implied by the same identity.
    pub paper_half_omega_claim: f64,
    pub paper_half_omega_claim_holds: bool,
    /// Whether `h(1/2) = 0` (to [`CLAIM_TOLERANCE`] relative to `1/ω`).
    pub paper_half_period_zero_holds: bool,
    pub lemma27_holds: bool,
}

/// `h(t) = √(r³/N) sin(√(N/r³) t)`, the Jacobi field with `h(0) = 0`,
/// `h'(0) = 1`.
pub fn jacobi_solution(config: &CircularConfig, t: f64) -> f64 {
    let omega = config.stiffness().sqrt();
    (omega * t).sin() / omega
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CLAIM_TOLERANCE * a.abs().max(b.abs())
}

pub fn analyze(config: &CircularConfig) -> Result<JacobiReport> {
    let n = config.n();
    let nf = n as f64;
    let r3 = config.radius().powi(3);
    let omega = config.stiffness().sqrt();
    let conjugate_point = PI / omega;
    let half_period_value = jacobi_solution(config, 0.5);
    let paper_c_claim = 1.0 / (2.0 * nf);
    let paper_half_omega_claim = nf * PI;
    Ok(JacobiReport {
        n,
        p_coeff: 0.5,
        q_coeff: -nf / (2.0 * r3),
        omega,
        conjugate_point,
        half_period_value,
        zero_loop_is_saddle: conjugate_point < 0.5,
        paper_c_claim,
        paper_c_claim_holds: close(conjugate_point, paper_c_claim),
        paper_half_omega_claim,
        paper_half_omega_claim_holds: close(0.5 * omega, paper_half_omega_claim),
        paper_half_period_zero_holds: half_period_value.abs() <= CLAIM_TOLERANCE / omega,
        lemma27_holds: lemma27_check(n)?.holds,
    })
}

/// Value of `∫₀¹ (P h'² + Q h²) dt` on the unit-L² mode `h = √2 sin(2πkt)`:
/// `(2πk)²/2 - N/(2r³)`.
pub fn second_variation_mode(config: &CircularConfig, k: usize) -> Result<f64> {
    if k == 0 {
        return invalid("mode index must be at least 1");
    }
    let w = 2.0 * PI * k as f64;
    Ok(0.5 * w * w - 0.5 * config.stiffness())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanEntry {
    pub n: usize,
    pub csc_sum: f64,
    pub radius: f64,
    pub conjugate_point: f64,
    pub is_saddle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaddleScan {
    pub entries: Vec<ScanEntry>,
    /// Smallest scanned `n` at which the planar loop is no longer a saddle.
    pub n_star: Option<usize>,
}

impl SaddleScan {
    /// Number of saddle/non-saddle flips between consecutive entries.
    pub fn crossings(&self) -> usize {
        self.entries
            .windows(2)
            .filter(|w| w[0].is_saddle != w[1].is_saddle)
            .count()
    }
}

pub fn saddle_scan(n_min: usize, n_max: usize) -> Result<SaddleScan> {
    if n_min < 2 || n_min > n_max {
        return invalid(format!("scan range {n_min}:{n_max} must satisfy 2 <= n_min <= n_max"));
    }
    let entries = (n_min..=n_max)
        .map(|n| {
            let config = build_config(n)?;
            let conjugate_point = PI / config.stiffness().sqrt();
            Ok(ScanEntry {
                n,
                csc_sum: config.csc_sum(),
                radius: config.radius(),
                conjugate_point,
                is_saddle: conjugate_point < 0.5,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n_star = entries.iter().find(|e| !e.is_saddle).map(|e| e.n);
    Ok(SaddleScan { entries, n_star })
}
