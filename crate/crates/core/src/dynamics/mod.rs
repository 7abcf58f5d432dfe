//! The axial equation of motion `z'' = -N z / (r² + z²)^{3/2}`.
//!
//! On the symmetry axis every primary sits at distance `√(r² + z²)`
//! regardless of the ring's phase, so the reduced system is autonomous and
//! conserves `E = v²/2 - N/√(r² + z²)`.

mod stepper;

pub use stepper::{RungeKutta4, Stepper, StepperRegistry, VelocityVerlet};

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::geometry::CircularConfig;
use crate::loopspace::LoopPath;

pub const DEFAULT_DT: f64 = 1e-4;
pub const DEFAULT_STEPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub z: f64,
    pub v: f64,
    pub energy: f64,
}

/// Axial force on the massless body at height `z`.
pub fn axial_force(config: &CircularConfig, z: f64) -> f64 {
    let d2 = config.radius().powi(2) + z * z;
    -(config.n() as f64) * z / (d2 * d2.sqrt())
}

pub fn energy(config: &CircularConfig, z: f64, v: f64) -> f64 {
    0.5 * v * v - config.n() as f64 / (config.radius().powi(2) + z * z).sqrt()
}

fn sample(config: &CircularConfig, t: f64, z: f64, v: f64) -> TrajectorySample {
    TrajectorySample {
        t,
        z,
        v,
        energy: energy(config, z, v),
    }
}

/// Advance `(z, v)` by `steps` steps of signed size `dt`; returns the final
/// state.
pub fn propagate(stepper: &dyn Stepper, config: &CircularConfig, z0: f64, v0: f64, dt: f64, steps: usize) -> (f64, f64) {
    let accel = |z: f64| axial_force(config, z);
    let (mut z, mut v) = (z0, v0);
    for _ in 0..steps {
        (z, v) = stepper.step(&accel, z, v, dt);
    }
    (z, v)
}

/// Fixed-step integration with the default fourth-order scheme. Emits
/// `steps + 1` samples starting at `t = 0`.
pub fn integrate(config: &CircularConfig, z0: f64, v0: f64, dt: f64, steps: usize) -> Result<Vec<TrajectorySample>> {
    integrate_with(&RungeKutta4, config, z0, v0, dt, steps)
}

pub fn integrate_with(
    stepper: &dyn Stepper,
    config: &CircularConfig,
    z0: f64,
    v0: f64,
    dt: f64,
    steps: usize,
) -> Result<Vec<TrajectorySample>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return invalid(format!("dt must be positive, got {dt}"));
    }
    if steps == 0 {
        return invalid("steps must be at least 1");
    }
    if !(z0.is_finite() && v0.is_finite()) {
        return invalid("initial state must be finite");
    }
    let accel = |z: f64| axial_force(config, z);
    let mut out = Vec::with_capacity(steps + 1);
    let (mut z, mut v) = (z0, v0);
    out.push(sample(config, 0.0, z, v));
    for i in 1..=steps {
        (z, v) = stepper.step(&accel, z, v, dt);
        out.push(sample(config, i as f64 * dt, z, v));
    }
    Ok(out)
}

/// `max_i |E(t_i) - E(t_0)|`.
pub fn energy_drift_max(samples: &[TrajectorySample]) -> f64 {
    let Some(first) = samples.first() else {
        return 0.0;
    };
    samples
        .iter()
        .map(|s| (s.energy - first.energy).abs())
        .fold(0.0, f64::max)
}

/// Times at which `z` crosses zero going downward, located on the cubic
/// Hermite interpolant through consecutive samples.
pub fn downward_crossings(samples: &[TrajectorySample]) -> Vec<f64> {
    let mut out = Vec::new();
    for w in samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if !(a.z > 0.0 && b.z <= 0.0) {
            continue;
        }
        let h = b.t - a.t;
        let hermite = |s: f64| {
            let s2 = s * s;
            let s3 = s2 * s;
            (2.0 * s3 - 3.0 * s2 + 1.0) * a.z
                + (s3 - 2.0 * s2 + s) * h * a.v
                + (-2.0 * s3 + 3.0 * s2) * b.z
                + (s3 - s2) * h * b.v
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if hermite(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(a.t + 0.5 * (lo + hi) * h);
    }
    out
}

/// Mean spacing of downward zero crossings, if there are at least two.
pub fn measured_period(samples: &[TrajectorySample]) -> Option<f64> {
    let c = downward_crossings(samples);
    (c.len() >= 2).then(|| (c[c.len() - 1] - c[0]) / (c.len() - 1) as f64)
}

/// Period `2π √(r³/N)` of small axial oscillations.
pub fn linear_period(config: &CircularConfig) -> f64 {
    2.0 * std::f64::consts::PI / config.stiffness().sqrt()
}

/// `max_s |z''(t_s) - F(z(t_s))|` on `samples` uniform times, with `z''` from
/// exact differentiation of the series.
pub fn el_residual(config: &CircularConfig, path: &LoopPath, samples: usize) -> Result<f64> {
    if samples < 2 * path.max_harmonic() {
        return invalid(format!(
            "el_residual needs at least {} samples, got {samples}",
            2 * path.max_harmonic()
        ));
    }
    Ok((0..samples)
        .map(|s| {
            let t = s as f64 / samples as f64;
            let z = path.evaluate(t).0;
            (path.second_derivative(t) - axial_force(config, z)).abs()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_config;
    use crate::loopspace::{random_loop, SymmetryClass};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn force_is_odd_and_vanishes_at_origin() {
        let c = build_config(3).unwrap();
        assert_eq!(axial_force(&c, 0.0), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let z: f64 = rng.gen_range(-5.0..5.0);
            assert!((axial_force(&c, z) + axial_force(&c, -z)).abs() <= 1e-15);
        }
    }

    #[test]
    fn force_matches_ring_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [2, 3, 6] {
            let c = build_config(n).unwrap();
            for _ in 0..20 {
                let t: f64 = rng.gen_range(0.0..1.0);
                let z: f64 = rng.gen_range(-2.0..2.0);
                let mut f = [0.0; 3];
                for j in 1..=n {
                    let [x, y] = c.position(j, t);
                    let d = [x, y, -z];
                    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                    for i in 0..3 {
                        f[i] += d[i] / (r * r * r);
                    }
                }
                assert!(f[0].abs() <= 1e-12 && f[1].abs() <= 1e-12, "{f:?}");
                assert!((f[2] - axial_force(&c, z)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn equilibrium_stays_put() {
        let c = build_config(2).unwrap();
        let tr = integrate(&c, 0.0, 0.0, 1e-4, 1000).unwrap();
        assert_eq!(tr.len(), 1001);
        assert!(tr.iter().all(|s| s.z == 0.0 && s.v == 0.0));
    }

    #[test]
    fn small_oscillation_energy() {
        let c = build_config(2).unwrap();
        let tr = integrate(&c, 0.05, 0.0, 1e-4, 10_000).unwrap();
        assert!(energy_drift_max(&tr) <= 1e-10);
    }

    #[test]
    fn time_reversal() {
        let c = build_config(2).unwrap();
        let (z, v) = propagate(&RungeKutta4, &c, 0.3, 0.1, 1e-4, 10_000);
        let (z0, v0) = propagate(&RungeKutta4, &c, z, v, -1e-4, 10_000);
        assert!((z0 - 0.3).abs() <= 1e-8 && (v0 - 0.1).abs() <= 1e-8);
    }

    #[test]
    fn odd_trajectory_from_origin() {
        let c = build_config(3).unwrap();
        for steps in [1000, 5000] {
            let (zf, vf) = propagate(&RungeKutta4, &c, 0.0, 2.0, 1e-4, steps);
            let (zb, vb) = propagate(&RungeKutta4, &c, 0.0, 2.0, -1e-4, steps);
            assert!((zf + zb).abs() <= 1e-12);
            assert!((vf - vb).abs() <= 1e-12);
        }
    }

    #[test]
    fn argument_validation() {
        let c = build_config(2).unwrap();
        assert!(integrate(&c, 0.0, 0.0, 0.0, 10).is_err());
        assert!(integrate(&c, 0.0, 0.0, 1e-3, 0).is_err());
        assert!(integrate(&c, f64::NAN, 0.0, 1e-3, 1).is_err());
        let l = random_loop(SymmetryClass::Lambda1, 8, 0.5, 1).unwrap();
        assert!(el_residual(&c, &l, 15).is_err());
    }

    #[test]
    fn el_residual_bounds() {
        let c = build_config(2).unwrap();
        assert_eq!(el_residual(&c, &LoopPath::zero(SymmetryClass::Lambda1, 4), 64).unwrap(), 0.0);
        let l = random_loop(SymmetryClass::Lambda2, 8, 0.5, 3).unwrap();
        assert!(el_residual(&c, &l, 256).unwrap() > 1e-2);
    }
}
