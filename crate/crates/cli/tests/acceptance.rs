//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line and then
//! asserts; tolerances are fixed here.
//!
//! Run with `cargo test -p ringorbit-cli --test acceptance -- --nocapture`
//! to see the summary lines.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ringorbit_core::action::{minimize_multistart, ActionFunctional, MinimizeSettings, Start};
use ringorbit_core::dynamics::{
    el_residual, energy_drift_max, integrate, linear_period, measured_period, propagate, RungeKutta4,
};
use ringorbit_core::geometry::{build_config, csc_sum, lemma27_check, ring_residual};
use ringorbit_core::jacobi::{analyze, jacobi_solution, saddle_scan, second_variation_mode};
use ringorbit_core::loopspace::{random_loop, Harmonic, LoopPath, SymmetryClass};
use ringorbit_core::optimize::Bfgs;

fn report(id: u32, title: &str, ok: bool, elapsed: Duration, detail: &str) {
    println!(
        "[{}] criterion {id}: {title} ({:.3} s) {detail}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Independent plain summation of Σ 1/sin(πj/n).
fn brute_csc_sum(n: usize) -> f64 {
    (1..n).map(|j| 1.0 / (PI * j as f64 / n as f64).sin()).sum()
}

#[test]
fn criterion_1_radius() {
    let start = Instant::now();
    let mut worst_residual = 0.0_f64;
    let mut worst_identity = 0.0_f64;
    for n in 2..=64 {
        let c = build_config(n).unwrap();
        for t in [0.0, 0.25, 0.7] {
            worst_residual = worst_residual.max(ring_residual(&c, t, 16).unwrap());
        }
        worst_identity = worst_identity.max(rel(c.radius().powi(3) * 16.0 * PI * PI, csc_sum(n).unwrap()));
    }
    let elapsed = start.elapsed();
    let ok = worst_residual <= 1e-8 && worst_identity <= 1e-12 && elapsed < Duration::from_secs(1);
    report(
        1,
        "radius correctness",
        ok,
        elapsed,
        &format!("max ring residual {worst_residual:e}, max r³16π²/Σ rel. error {worst_identity:e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_2_lemma27_audit() {
    let start = Instant::now();
    let mut prev = 0.0;
    let mut all_false = true;
    let mut increasing = true;
    for n in 2..=1000 {
        let c = lemma27_check(n).unwrap();
        if n <= 5 || n % 250 == 0 {
            println!("  n = {n}: lhs = {}, rhs = {}, holds = {}", c.lhs, c.rhs, c.holds);
        }
        all_false &= !c.holds;
        increasing &= c.lhs > prev;
        prev = c.lhs;
    }
    let elapsed = start.elapsed();
    let ok = all_false && increasing && elapsed < Duration::from_secs(1);
    report(
        2,
        "4/N identity audit",
        ok,
        elapsed,
        &format!("holds=false for all n in [2,1000]: {all_false}; lhs strictly increasing: {increasing}"),
    );
    assert!(ok);
}

#[test]
fn criterion_3_jacobi() {
    let start = Instant::now();
    let mut ok = true;
    let mut worst_fd = 0.0_f64;
    for n in [2, 3, 4, 5] {
        let c = build_config(n).unwrap();
        let rep = analyze(&c).unwrap();
        let formula = 0.25 * (csc_sum(n).unwrap() / n as f64).sqrt();
        ok &= rel(rep.conjugate_point, formula) <= 1e-12;
        ok &= rep.conjugate_point < 0.5 && rep.zero_loop_is_saddle;
        // Five-point second difference on [0, 1/2].
        let h = 1e-3;
        for i in 0..=500 {
            let t = 0.5 * i as f64 / 500.0;
            let g = |s: f64| jacobi_solution(&c, t + s);
            let second = (-g(2.0 * h) + 16.0 * g(h) - 30.0 * g(0.0) + 16.0 * g(-h) - g(-2.0 * h)) / (12.0 * h * h);
            worst_fd = worst_fd.max((second + c.stiffness() * g(0.0)).abs());
        }
        ok &= jacobi_solution(&c, rep.conjugate_point).abs() <= 1e-13;
    }
    ok &= worst_fd <= 1e-6;

    let scan = saddle_scan(2, 1000).unwrap();
    let oracle = (2..=1000).find(|&n| brute_csc_sum(n) >= 4.0 * n as f64);
    ok &= scan.crossings() == 1 && scan.n_star.is_some() && scan.n_star == oracle;
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(5);
    report(
        3,
        "Jacobi analysis",
        ok,
        elapsed,
        &format!(
            "max Jacobi FD residual {worst_fd:e}; crossings {}; n_star {:?} (oracle {:?})",
            scan.crossings(),
            scan.n_star,
            oracle
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_4_hessian_mode_consistency() {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for n in [2, 3, 5, 8] {
        let c = build_config(n).unwrap();
        let k_max = 16;
        for class in SymmetryClass::ALL {
            let zero = LoopPath::zero(class, k_max);
            let f = ActionFunctional::for_loop(c, &zero, 8 * k_max).unwrap();
            for k in (1..=k_max).filter(|&k| class.allows_sine(k)) {
                let mut e = vec![0.0; 2 * k_max];
                e[2 * k - 1] = 1.0;
                let diag = f.hessian_vector(&zero, &e).unwrap()[2 * k - 1];
                worst = worst.max(rel(diag, second_variation_mode(&c, k).unwrap()));
            }
        }
    }
    let c2 = build_config(2).unwrap();
    let k1 = second_variation_mode(&c2, 1).unwrap();
    let k3 = second_variation_mode(&c2, 3).unwrap();
    let elapsed = start.elapsed();
    let ok = worst <= 1e-10 && k1 < 0.0 && k3 > 0.0 && elapsed < Duration::from_secs(5);
    report(
        4,
        "Hessian/mode consistency",
        ok,
        elapsed,
        &format!("max rel. diff {worst:e}; n=2 modes k=1 {k1}, k=3 {k3}"),
    );
    assert!(ok);
}

#[test]
fn criterion_5_nonplanar_solutions() {
    let start = Instant::now();
    let mut ok = true;
    let mut failures = Vec::new();
    for n in [2, 3, 4, 5] {
        let c = build_config(n).unwrap();
        let f0 = n as f64 / c.radius();
        for class in SymmetryClass::ALL {
            let mut settings = MinimizeSettings::new(class, 16);
            settings.grid = 256;
            settings.tolerance = 1e-8;
            let starts: Vec<Start> = (0..4).map(Start::seeded).collect();
            let best = minimize_multistart(&c, &settings, &starts, &Bfgs::default()).unwrap().best;
            let el = el_residual(&c, &best.loop_path, settings.grid).unwrap();
            let symmetry = best.loop_path.symmetry_violation(1000);
            let checks = [
                ("converged", best.converged),
                ("action < N/r - 1e-6", best.action < f0 - 1e-6),
                ("amplitude > 1e-2", best.amplitude > 1e-2),
                ("el_residual <= 1e-4", el <= 1e-4),
                ("symmetry <= 1e-13", symmetry <= 1e-13),
            ];
            println!(
                "  n = {n} {class}: action {} (N/r {f0}), amplitude {}, el_residual {el:e}, symmetry {symmetry:e}",
                best.action, best.amplitude
            );
            for (name, pass) in checks {
                if !pass {
                    failures.push(format!("n={n} {class}: {name}"));
                }
                ok &= pass;
            }
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    report(
        5,
        "nonplanar periodic minimizers (K=16, grid=256, tol=1e-8, 4 seeds)",
        ok,
        elapsed,
        &if failures.is_empty() {
            String::new()
        } else {
            format!("failed clauses: {}", failures.join("; "))
        },
    );
    assert!(ok, "{failures:?}");
}

#[test]
fn criterion_6_gradient_fidelity() {
    let start = Instant::now();
    let c = build_config(2).unwrap();
    let k_max = 16;
    let mut worst = 0.0_f64;
    for class in SymmetryClass::ALL {
        for seed in 0..20 {
            let path = random_loop(class, k_max, 0.5, 1000 + seed).unwrap();
            let f = ActionFunctional::for_loop(c, &path, 8 * k_max).unwrap();
            let x = path.coefficients();
            let g = f.evaluate(&path).unwrap().gradient;
            let h = 1e-6;
            for i in class.free_slots(k_max) {
                let mut plus = x.clone();
                let mut minus = x.clone();
                plus[i] += h;
                minus[i] -= h;
                let fd = (f.value(&plus).unwrap() - f.value(&minus).unwrap()) / (2.0 * h);
                worst = worst.max((fd - g[i]).abs() / g[i].abs().max(1.0));
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-5 && elapsed < Duration::from_secs(5);
    report(6, "gradient fidelity", ok, elapsed, &format!("max component error {worst:e}"));
    assert!(ok);
}

#[test]
fn criterion_7_dynamics() {
    let start = Instant::now();
    let mut worst_drift = 0.0_f64;
    for n in [2, 3, 5, 16] {
        let c = build_config(n).unwrap();
        for amplitude in [0.01, 0.1, 0.5, 1.0] {
            let tr = integrate(&c, amplitude, 0.0, 1e-4, 10_000).unwrap();
            worst_drift = worst_drift.max(energy_drift_max(&tr));
        }
    }
    let mut worst_period = 0.0_f64;
    for n in [2, 3, 5] {
        let c = build_config(n).unwrap();
        let tr = integrate(&c, 1e-5, 0.0, 1e-4, 10_000).unwrap();
        worst_period = worst_period.max(rel(measured_period(&tr).unwrap(), linear_period(&c)));
    }
    let mut worst_return = 0.0_f64;
    for n in [2, 3, 4, 5] {
        let c = build_config(n).unwrap();
        for class in SymmetryClass::ALL {
            let settings = MinimizeSettings::new(class, 64);
            let starts: Vec<Start> = (0..4).map(Start::seeded).collect();
            let best = minimize_multistart(&c, &settings, &starts, &Bfgs::default()).unwrap().best;
            assert!(best.converged);
            let (z0, v0) = best.loop_path.evaluate(0.0);
            let (z1, v1) = propagate(&RungeKutta4, &c, z0, v0, 1e-4, 10_000);
            worst_return = worst_return.max((z1 - z0).abs()).max((v1 - v0).abs());
        }
    }
    let elapsed = start.elapsed();
    let ok = worst_drift <= 1e-10 && worst_period <= 1e-6 && worst_return <= 1e-4 && elapsed < Duration::from_secs(10);
    report(
        7,
        "dynamics",
        ok,
        elapsed,
        &format!(
            "energy drift {worst_drift:e}; period rel. error {worst_period:e}; minimizer return error {worst_return:e} (K=64)"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_8_poincare_wirtinger() {
    let start = Instant::now();
    let mut ok = true;
    let mut worst_eq = 0.0_f64;
    for class in SymmetryClass::ALL {
        for seed in 0..100 {
            let k_max = 1 + (seed as usize % 12);
            let path = random_loop(class, k_max, 1.0, seed).unwrap();
            // Trapezoid on 8K nodes integrates these trigonometric
            // polynomials exactly.
            let m = 8 * k_max;
            let (mut zz, mut vv) = (0.0, 0.0);
            for j in 0..m {
                let (z, v) = path.evaluate(j as f64 / m as f64);
                zz += z * z / m as f64;
                vv += v * v / m as f64;
            }
            ok &= vv >= 4.0 * PI * PI * zz * (1.0 - 1e-12);
            ok &= path.mean_square_velocity() >= 4.0 * PI * PI * path.mean_square();
        }
        let single = LoopPath::new(class, 1, &[Harmonic::new(1, 0.0, 0.7)]).unwrap();
        let lhs = single.mean_square_velocity();
        let rhs = 4.0 * PI * PI * single.mean_square();
        worst_eq = worst_eq.max(rel(lhs, rhs));
        if class == SymmetryClass::Lambda1 {
            let both = LoopPath::new(class, 1, &[Harmonic::new(1, -0.2, 0.3)]).unwrap();
            worst_eq = worst_eq.max(rel(both.mean_square_velocity(), 4.0 * PI * PI * both.mean_square()));
        }
    }
    ok &= worst_eq <= 1e-12;
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(1);
    report(
        8,
        "Poincaré-Wirtinger invariant",
        ok,
        elapsed,
        &format!("k=1 equality rel. error {worst_eq:e}"),
    );
    assert!(ok);
}

fn run(args: &[&str], dir: &Path) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_ringorbit"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

#[test]
fn criterion_9_reproducibility() {
    let start = Instant::now();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let commands: Vec<Vec<&str>> = vec![
        vec!["radius", "--n", "7"],
        vec!["minimize", "--n", "3", "--space", "lambda2", "--harmonics", "16", "--out", "loop.json"],
        vec!["minimize", "--n", "2", "--space", "lambda1", "--harmonics", "16", "--seed", "9,4"],
        vec!["jacobi", "--n", "4"],
        vec!["jacobi", "--scan", "2:600", "--out", "scan.csv"],
        vec!["integrate", "--n", "2", "--z0", "0.3", "--v0", "0.1", "--steps", "2000", "--out", "traj.csv"],
        vec!["integrate", "--n", "5", "--z0", "0.2", "--steps", "500", "--format", "csv"],
        vec!["verify", "loop.json"],
    ];
    let mut ok = true;
    for cmd in &commands {
        let a = run(cmd, dirs[0].path());
        let b = run(cmd, dirs[1].path());
        let same = a == b && !a.1.is_empty();
        if !same {
            println!("  differs: {cmd:?}");
        }
        ok &= same;
    }
    for file in ["loop.json", "scan.csv", "traj.csv"] {
        let a = std::fs::read(dirs[0].path().join(file)).unwrap();
        let b = std::fs::read(dirs[1].path().join(file)).unwrap();
        ok &= a == b && !a.is_empty();
    }
    let elapsed = start.elapsed();
    report(
        9,
        "byte-identical CLI outputs",
        ok,
        elapsed,
        &format!("{} commands, 3 output files", commands.len()),
    );
    assert!(ok);
}
