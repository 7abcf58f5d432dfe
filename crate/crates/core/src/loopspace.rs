//! Periodic axial loops `z(t) = Σ_k [a_k cos(2πkt) + b_k sin(2πkt)]`.
//!
//! A [`LoopPath`] stores dense cosine/sine coefficients for `k = 1, …, K`.
//! There is never a constant term, so every loop has zero mean. The two
//! symmetry classes are exact coefficient constraints:
//!
//! * `Lambda1`, `z(t + 1/2) = -z(t)`: only odd `k` may be nonzero.
//! * `Lambda2`, `z(-t) = -z(t)`: every cosine coefficient is zero.
//!
//! Coefficient vectors use the interleaved layout
//! `[a_1, b_1, a_2, b_2, …, a_K, b_K]`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default truncation order.
pub const DEFAULT_MAX_HARMONIC: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryClass {
    /// Anti-half-period loops, `z(t + 1/2) = -z(t)`.
    Lambda1,
    /// Odd loops, `z(-t) = -z(t)`.
    Lambda2,
}

impl SymmetryClass {
    pub const ALL: [SymmetryClass; 2] = [SymmetryClass::Lambda1, SymmetryClass::Lambda2];

    pub fn allows_cosine(self, k: usize) -> bool {
        match self {
            SymmetryClass::Lambda1 => k % 2 == 1,
            SymmetryClass::Lambda2 => false,
        }
    }

    pub fn allows_sine(self, k: usize) -> bool {
        match self {
            SymmetryClass::Lambda1 => k % 2 == 1,
            SymmetryClass::Lambda2 => k >= 1,
        }
    }

    /// Whether slot `index` of the interleaved coefficient layout is free.
    pub fn allows_slot(self, index: usize) -> bool {
        let k = index / 2 + 1;
        if index.is_multiple_of(2) {
            self.allows_cosine(k)
        } else {
            self.allows_sine(k)
        }
    }

    /// Indices of the free slots for a loop truncated at `max_harmonic`.
    pub fn free_slots(self, max_harmonic: usize) -> Vec<usize> {
        (0..2 * max_harmonic).filter(|&i| self.allows_slot(i)).collect()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SymmetryClass::Lambda1 => "lambda1",
            SymmetryClass::Lambda2 => "lambda2",
        }
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SymmetryClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lambda1" | "l1" => Ok(SymmetryClass::Lambda1),
            "lambda2" | "l2" => Ok(SymmetryClass::Lambda2),
            other => invalid(format!("unknown symmetry class '{other}' (expected lambda1 or lambda2)")),
        }
    }
}

/// One `(k, a_k, b_k)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub k: usize,
    pub a: f64,
    pub b: f64,
}

impl Harmonic {
    pub fn new(k: usize, a: f64, b: f64) -> Self {
        Self { k, a, b }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopPath {
    symmetry: SymmetryClass,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

/// `2π·frac(k·t)`, with `t` first reduced to `[0, 1)` so that `t` and `t + 1`
/// give identical phases.
#[inline]
fn phase(k: usize, t: f64) -> f64 {
    let tau = t.rem_euclid(1.0);
    2.0 * PI * (k as f64 * tau).rem_euclid(1.0)
}

impl LoopPath {
    /// The planar loop `z ≡ 0`.
    pub fn zero(symmetry: SymmetryClass, max_harmonic: usize) -> Self {
        let k = max_harmonic.max(1);
        Self {
            symmetry,
            cos: vec![0.0; k],
            sin: vec![0.0; k],
        }
    }

    /// Strict constructor: every listed coefficient must be allowed by the
    /// class, indices must be positive, and each `k` may appear once.
    pub fn new(symmetry: SymmetryClass, max_harmonic: usize, harmonics: &[Harmonic]) -> Result<Self> {
        if max_harmonic == 0 {
            return invalid("max_harmonic must be at least 1");
        }
        let mut out = Self::zero(symmetry, max_harmonic);
        let mut seen = vec![false; max_harmonic];
        for h in harmonics {
            if h.k == 0 {
                return invalid("harmonic index 0 (constant term) is not allowed");
            }
            if h.k > max_harmonic {
                return invalid(format!("harmonic k = {} exceeds max_harmonic {max_harmonic}", h.k));
            }
            if !(h.a.is_finite() && h.b.is_finite()) {
                return invalid(format!("harmonic k = {} has a non-finite coefficient", h.k));
            }
            if std::mem::replace(&mut seen[h.k - 1], true) {
                return invalid(format!("harmonic k = {} listed twice", h.k));
            }
            if h.a != 0.0 && !symmetry.allows_cosine(h.k) {
                return invalid(format!("cosine coefficient at k = {} violates {symmetry}", h.k));
            }
            if h.b != 0.0 && !symmetry.allows_sine(h.k) {
                return invalid(format!("sine coefficient at k = {} violates {symmetry}", h.k));
            }
            out.cos[h.k - 1] = h.a;
            out.sin[h.k - 1] = h.b;
        }
        Ok(out)
    }

    /// Build from an interleaved coefficient vector of even length `2K`.
    pub fn from_coefficients(symmetry: SymmetryClass, coefficients: &[f64]) -> Result<Self> {
        if coefficients.is_empty() || !coefficients.len().is_multiple_of(2) {
            return invalid(format!(
                "coefficient vector must have positive even length, got {}",
                coefficients.len()
            ));
        }
        check_in_class(symmetry, coefficients)?;
        Ok(Self {
            symmetry,
            cos: coefficients.iter().step_by(2).copied().collect(),
            sin: coefficients.iter().skip(1).step_by(2).copied().collect(),
        })
    }

    pub fn symmetry(&self) -> SymmetryClass {
        self.symmetry
    }

    pub fn max_harmonic(&self) -> usize {
        self.cos.len()
    }

    pub fn cosine(&self, k: usize) -> f64 {
        self.cos[k - 1]
    }

    pub fn sine(&self, k: usize) -> f64 {
        self.sin[k - 1]
    }

    /// Interleaved coefficient vector of length `2K`.
    pub fn coefficients(&self) -> Vec<f64> {
        self.cos
            .iter()
            .zip(&self.sin)
            .flat_map(|(&a, &b)| [a, b])
            .collect()
    }

    /// Every class-allowed harmonic, ascending in `k`, zeros included.
    pub fn harmonics(&self) -> Vec<Harmonic> {
        (1..=self.max_harmonic())
            .filter(|&k| self.symmetry.allows_cosine(k) || self.symmetry.allows_sine(k))
            .map(|k| Harmonic::new(k, self.cos[k - 1], self.sin[k - 1]))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|&c| c == 0.0)
    }

    /// Returns `(z(t), ż(t))`.
    pub fn evaluate(&self, t: f64) -> (f64, f64) {
        let mut z = 0.0;
        let mut zdot = 0.0;
        for k in 1..=self.max_harmonic() {
            let (a, b) = (self.cos[k - 1], self.sin[k - 1]);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let (s, c) = phase(k, t).sin_cos();
            let w = 2.0 * PI * k as f64;
            z += a * c + b * s;
            zdot += w * (b * c - a * s);
        }
        (z, zdot)
    }

    /// `z''(t)` by termwise differentiation.
    pub fn second_derivative(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for k in 1..=self.max_harmonic() {
            let (a, b) = (self.cos[k - 1], self.sin[k - 1]);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let (s, c) = phase(k, t).sin_cos();
            let w = 2.0 * PI * k as f64;
            acc -= w * w * (a * c + b * s);
        }
        acc
    }

    /// `∫₀¹ z² dt` by Parseval.
    pub fn mean_square(&self) -> f64 {
        0.5 * self
            .cos
            .iter()
            .zip(&self.sin)
            .map(|(a, b)| a * a + b * b)
            .sum::<f64>()
    }

    /// `∫₀¹ ż² dt` by Parseval.
    pub fn mean_square_velocity(&self) -> f64 {
        0.5 * self
            .cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(i, (a, b))| {
                let w = 2.0 * PI * (i + 1) as f64;
                w * w * (a * a + b * b)
            })
            .sum::<f64>()
    }

    /// `∫ż² / (4π² ∫z²)`, or `None` for the zero loop.
    ///
    /// Evaluated as `Σ k²(a²+b²) / Σ (a²+b²)` so that single-mode `k = 1`
    /// loops give exactly `1`.
    pub fn poincare_wirtinger_ratio(&self) -> Option<f64> {
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let k = (i + 1) as f64;
            let e = a * a + b * b;
            num += k * k * e;
            den += e;
        }
        (den > 0.0).then(|| num / den)
    }

    /// `‖z‖_{L²} + ‖ż‖_{L²}`.
    pub fn sobolev_norm(&self) -> f64 {
        self.mean_square().sqrt() + self.mean_square_velocity().sqrt()
    }

    /// Largest violation of the class identity over `samples` uniformly spaced
    /// times in `[0, 1)`.
    pub fn symmetry_violation(&self, samples: usize) -> f64 {
        (0..samples.max(1))
            .map(|i| {
                let t = i as f64 / samples.max(1) as f64;
                let z = self.evaluate(t).0;
                let partner = match self.symmetry {
                    SymmetryClass::Lambda1 => self.evaluate(t + 0.5).0,
                    SymmetryClass::Lambda2 => self.evaluate(-t).0,
                };
                (z + partner).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            symmetry: self.symmetry,
            cos: self.cos.iter().map(|c| c * factor).collect(),
            sin: self.sin.iter().map(|c| c * factor).collect(),
        }
    }

    /// Truncate or zero-pad to a new order.
    pub fn resized(&self, max_harmonic: usize) -> Self {
        let k = max_harmonic.max(1);
        let mut cos = self.cos.clone();
        let mut sin = self.sin.clone();
        cos.resize(k, 0.0);
        sin.resize(k, 0.0);
        Self {
            symmetry: self.symmetry,
            cos,
            sin,
        }
    }

    /// The loop `t ↦ -z(t + 1/2)`. On `Lambda1` this is the identity map.
    pub fn half_shift_negated(&self) -> Self {
        let mut out = self.clone();
        for k in 1..=self.max_harmonic() {
            // z(t + 1/2) multiplies mode k by (-1)^k.
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            out.cos[k - 1] *= sign;
            out.sin[k - 1] *= sign;
        }
        out
    }

    /// Copy with `delta` added to the `k`-th sine coefficient.
    pub fn with_sine_offset(&self, k: usize, delta: f64) -> Self {
        let mut out = self.resized(self.max_harmonic().max(k));
        out.sin[k - 1] += delta;
        out
    }
}

fn check_in_class(symmetry: SymmetryClass, coefficients: &[f64]) -> Result<()> {
    if let Some(i) = coefficients
        .iter()
        .enumerate()
        .position(|(i, &c)| c != 0.0 && !symmetry.allows_slot(i))
    {
        let kind = if i % 2 == 0 { "cosine" } else { "sine" };
        return invalid(format!(
            "{kind} coefficient at k = {} lies outside {symmetry}",
            i / 2 + 1
        ));
    }
    Ok(())
}

/// Zero every coefficient slot the class forbids.
pub fn project_coefficients(symmetry: SymmetryClass, coefficients: &mut [f64]) {
    for (i, c) in coefficients.iter_mut().enumerate() {
        if !symmetry.allows_slot(i) {
            *c = 0.0;
        }
    }
}

/// Project a raw harmonic list onto a class. Forbidden coefficients and any
/// `k = 0` entry are dropped; repeated `k` entries accumulate. Idempotent.
pub fn project(raw: &[Harmonic], symmetry: SymmetryClass) -> LoopPath {
    let max_harmonic = raw.iter().map(|h| h.k).max().unwrap_or(1).max(1);
    let mut out = LoopPath::zero(symmetry, max_harmonic);
    for h in raw.iter().filter(|h| h.k > 0) {
        if symmetry.allows_cosine(h.k) {
            out.cos[h.k - 1] += h.a;
        }
        if symmetry.allows_sine(h.k) {
            out.sin[h.k - 1] += h.b;
        }
    }
    out
}

/// Projection of an existing loop onto another class.
pub fn project_loop(path: &LoopPath, symmetry: SymmetryClass) -> LoopPath {
    let mut coefficients = path.coefficients();
    project_coefficients(symmetry, &mut coefficients);
    LoopPath::from_coefficients(symmetry, &coefficients).expect("projected coefficients lie in class")
}

/// Uniform coefficients in `[-amplitude, amplitude]`, projected onto the
/// class. Deterministic in `seed`.
pub fn random_loop(symmetry: SymmetryClass, max_harmonic: usize, amplitude: f64, seed: u64) -> Result<LoopPath> {
    if max_harmonic == 0 {
        return invalid("max_harmonic must be at least 1");
    }
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return invalid(format!("amplitude must be positive, got {amplitude}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coefficients: Vec<f64> = (0..2 * max_harmonic)
        .map(|_| rng.gen_range(-amplitude..=amplitude))
        .collect();
    project_coefficients(symmetry, &mut coefficients);
    LoopPath::from_coefficients(symmetry, &coefficients)
}
