//! Fixed-step integrators for `z'' = a(z)`, selectable by name.

use crate::error::{invalid, Result};

pub trait Stepper: Send + Sync {
    fn name(&self) -> &'static str;

    fn order(&self) -> u32;

    /// Advance `(z, v)` by `dt` (which may be negative).
    fn step(&self, accel: &dyn Fn(f64) -> f64, z: f64, v: f64, dt: f64) -> (f64, f64);
}

/// Classical fourth-order Runge-Kutta on the first-order system `(z, v)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RungeKutta4;

impl Stepper for RungeKutta4 {
    fn name(&self) -> &'static str {
        "rk4"
    }

    fn order(&self) -> u32 {
        4
    }

    fn step(&self, accel: &dyn Fn(f64) -> f64, z: f64, v: f64, dt: f64) -> (f64, f64) {
        let half = 0.5 * dt;
        let k1z = v;
        let k1v = accel(z);
        let k2z = v + half * k1v;
        let k2v = accel(z + half * k1z);
        let k3z = v + half * k2v;
        let k3v = accel(z + half * k2z);
        let k4z = v + dt * k3v;
        let k4v = accel(z + dt * k3z);
        (
            z + dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z),
            v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        )
    }
}

/// Velocity Verlet (kick-drift-kick leapfrog). Symplectic, second order.
#[derive(Debug, Clone, Copy, Default)]
pub struct VelocityVerlet;

impl Stepper for VelocityVerlet {
    fn name(&self) -> &'static str {
        "verlet"
    }

    fn order(&self) -> u32 {
        2
    }

    fn step(&self, accel: &dyn Fn(f64) -> f64, z: f64, v: f64, dt: f64) -> (f64, f64) {
        let v_half = v + 0.5 * dt * accel(z);
        let z_new = z + dt * v_half;
        (z_new, v_half + 0.5 * dt * accel(z_new))
    }
}

pub struct StepperRegistry {
    entries: Vec<Box<dyn Stepper>>,
}

impl StepperRegistry {
    pub const DEFAULT: &'static str = "rk4";

    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn register(mut self, stepper: Box<dyn Stepper>) -> Self {
        self.entries.retain(|s| s.name() != stepper.name());
        self.entries.push(stepper);
        self
    }

    pub fn get(&self, name: &str) -> Result<&dyn Stepper> {
        match self.entries.iter().find(|s| s.name() == name) {
            Some(s) => Ok(s.as_ref()),
            None => invalid(format!(
                "unknown integrator '{name}' (available: {})",
                self.names().join(", ")
            )),
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|s| s.name()).collect()
    }
}

impl Default for StepperRegistry {
    fn default() -> Self {
        Self::empty()
            .register(Box::new(RungeKutta4))
            .register(Box::new(VelocityVerlet))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Harmonic oscillator z'' = -z over one period; global error scales as
    /// dt^order.
    fn period_error(stepper: &dyn Stepper, steps: usize) -> f64 {
        let dt = 2.0 * std::f64::consts::PI / steps as f64;
        let (mut z, mut v) = (1.0, 0.0);
        for _ in 0..steps {
            (z, v) = stepper.step(&|z| -z, z, v, dt);
        }
        (z - 1.0).hypot(v)
    }

    #[test]
    fn convergence_orders() {
        let reg = StepperRegistry::default();
        for name in reg.names() {
            let s = reg.get(name).unwrap();
            let e1 = period_error(s, 200);
            let e2 = period_error(s, 400);
            let observed = (e1 / e2).log2();
            assert!(
                (observed - s.order() as f64).abs() < 0.2,
                "{name}: observed order {observed}"
            );
        }
    }

    #[test]
    fn unknown_name() {
        assert!(StepperRegistry::default().get("euler").is_err());
        assert_eq!(StepperRegistry::default().names(), vec!["rk4", "verlet"]);
    }
}
