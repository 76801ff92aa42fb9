//! Acceptance gate: one pass/fail line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};

use foliate::diagnostics::{
    convergence_order, figure2_experiment, integrate_builtin, midpoint_coefficient,
};
use foliate::integrators::{
    ButcherTableau, DiscreteGradient, ImplicitMidpoint, LieEuler, Projection, Rkmk, RungeKutta,
    SolveConfig, Stepper,
};
use foliate::matgroup::{dexpinv, expm};
use foliate::systems::{builtin_system, Params};
use foliate::{Matrix, SeededRng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn params(kv: &[(&str, f64)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()))
}

fn linear_foliation_rk() -> Outcome {
    let sys = builtin_system("skew-product", &params(&[("a", 1.0), ("b", 1.0), ("c", 0.0)])).unwrap();
    let steppers: Vec<Box<dyn Stepper>> = vec![
        Box::new(RungeKutta::new(ButcherTableau::euler(), sys.plain().clone())),
        Box::new(ImplicitMidpoint::new(sys.plain().clone(), SolveConfig::default())),
        Box::new(RungeKutta::new(ButcherTableau::rk4(), sys.plain().clone())),
    ];
    let a = Matrix::column(&[1.0, 0.5]);
    let b = Matrix::column(&[1.0, -2.0]);
    let mut worst: f64 = 0.0;
    for s in &steppers {
        let ta = integrate_builtin(&sys, s.as_ref(), &a, 0.01, 100).unwrap();
        let tb = integrate_builtin(&sys, s.as_ref(), &b, 0.01, 100).unwrap();
        for (xa, xb) in ta.states.iter().zip(&tb.states) {
            worst = worst.max((xa[(0, 0)] - xb[(0, 0)]).abs());
        }
    }
    outcome(worst <= 1e-13, format!("max x-difference {worst:.2e} (≤ 1e-13)"))
}

fn midpoint_failure_coefficient() -> Outcome {
    let taus = [1e-2, 5e-3, 2.5e-3];
    let cases = [
        ([0.0, 1.0], 1.0, 0.01),
        ([1.0, 0.0], 1.5, 0.015),
        ([0.0, 3f64.sqrt()], 0.0, 0.01),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (x, want, tol) in cases {
        let c = midpoint_coefficient(&Matrix::column(&x), &taus).unwrap();
        pass &= (c - want).abs() <= tol;
        parts.push(format!("({:.3},{:.3}) → {c:.4} (want {want} ± {tol})", x[0], x[1]));
    }
    outcome(pass, parts.join("; "))
}

fn figure2() -> Outcome {
    let data = figure2_experiment(0.1, 4, 20, 2.0).unwrap();
    let lie_spread = data.lie_euler_spread.iter().copied().fold(0.0, f64::max);
    let mut r = vec![2.0f64];
    for _ in 0..4 {
        let p = *r.last().unwrap();
        r.push(p + 0.1 * p * (1.0 - p * p));
    }
    let mut r_err: f64 = 0.0;
    for t in &data.lie_euler {
        for (n, i) in t.leaf_values.iter().enumerate() {
            r_err = r_err.max((i[0].sqrt() - r[n]).abs());
        }
    }
    let euler4 = data.euler_spread[4];
    outcome(
        lie_spread <= 1e-12 && r_err <= 1e-12 && euler4 >= 1e-3,
        format!(
            "Lie–Euler spread {lie_spread:.2e} (≤ 1e-12), r-sequence error {r_err:.2e} (≤ 1e-12), \
             Euler spread at step 4 {euler4:.3e} (≥ 1e-3)"
        ),
    )
}

fn lorenz_splitting() -> Outcome {
    let sys = builtin_system("lorenz", &Params::new()).unwrap();
    let split = sys.splitting().unwrap();
    let traj = integrate_builtin(&sys, split, &Matrix::column(&[1.0, 1.0, 1.0]), 0.01, 1000).unwrap();
    let decay = (-2.0f64 * 10.0 * 0.01).exp();
    let worst = traj
        .leaf_values
        .windows(2)
        .map(|w| (w[1][0] - decay * w[0][0]).abs() / (1.0 + w[0][0].abs()))
        .fold(0.0, f64::max);
    outcome(worst <= 1e-10, format!("max scaled residual {worst:.2e} (≤ 1e-10)"))
}

fn projection() -> Outcome {
    let sys = builtin_system("eq1", &Params::new()).unwrap();
    let proj = Projection::with_tableau(sys.plain(), ButcherTableau::rk4(), SolveConfig::default()).unwrap();
    let mut x = sys.default_ic().clone();
    let mut i = sys.leaf_value(&x);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        (x, i) = proj.step_with_leaf(&x, &i, 0.01).unwrap();
        worst = worst.max(max_abs(&sys.leaf_value(&x), &i));
    }
    outcome(worst <= 1e-11, format!("max |I(xₙ) − Iₙ| {worst:.2e} (≤ 1e-11)"))
}

fn discrete_gradient() -> Outcome {
    let sys = builtin_system("eq1", &Params::new()).unwrap();
    let form = sys.gradient_form().unwrap().clone();
    let dg = DiscreteGradient::new(form.clone(), SolveConfig::default());
    let mut x = sys.default_ic().clone();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let xp = dg.step(&x, 0.01).unwrap();
        let (u, v) = (form.invariant(&x), form.invariant(&xp));
        worst = worst.max((v - u - 0.01 * form.reduced_bar(u, v)).abs());
        x = xp;
    }
    let frozen = form.without_reduced_flow();
    let dg0 = DiscreteGradient::new(frozen.clone(), SolveConfig::default());
    let x0 = sys.default_ic().clone();
    let i0 = frozen.invariant(&x0);
    let mut x = x0;
    let mut drift: f64 = 0.0;
    for _ in 0..1000 {
        x = dg0.step(&x, 0.01).unwrap();
        drift = drift.max((frozen.invariant(&x) - i0).abs());
    }
    outcome(
        worst <= 1e-11 && drift <= 1e-10,
        format!("discrete identity residual {worst:.2e} (≤ 1e-11), conserved drift with h = 0 {drift:.2e} (≤ 1e-10)"),
    )
}

fn isospectral() -> Outcome {
    let still = builtin_system("isospectral", &params(&[("alpha", 0.0), ("beta", 0.0)])).unwrap();
    let lie = LieEuler::new(still.foliate().unwrap().clone());
    let traj = integrate_builtin(&still, &lie, still.default_ic(), 0.01, 1000).unwrap();
    let i0 = &traj.leaf_values[0];
    let trace_drift = traj.leaf_values.iter().map(|i| max_abs(i, i0)).fold(0.0, f64::max);

    let sys = builtin_system("isospectral", &Params::new()).unwrap();
    let lie = LieEuler::new(sys.foliate().unwrap().clone());
    let pair = sys.leaf_bundle(sys.default_ic(), 2, 11);
    let ta = integrate_builtin(&sys, &lie, &pair[0], 0.01, 1000).unwrap();
    let tb = integrate_builtin(&sys, &lie, &pair[1], 0.01, 1000).unwrap();
    let pair_gap = ta
        .leaf_values
        .iter()
        .zip(&tb.leaf_values)
        .map(|(a, b)| max_abs(a, b))
        .fold(0.0, f64::max);
    outcome(
        trace_drift <= 1e-10 && pair_gap <= 1e-10,
        format!("trace drift with f ≡ 0 {trace_drift:.2e} (≤ 1e-10), similar-pair trace gap {pair_gap:.2e} (≤ 1e-10)"),
    )
}

fn stiefel() -> Outcome {
    let sys = builtin_system("left-mult", &params(&[("n", 3.0), ("p", 2.0), ("group", 0.0)])).unwrap();
    let rkmk = Rkmk::new(sys.foliate().unwrap().clone(), ButcherTableau::rk4());
    let pair = sys.leaf_bundle(sys.default_ic(), 2, 5);
    let ta = integrate_builtin(&sys, &rkmk, &pair[0], 0.01, 100).unwrap();
    let tb = integrate_builtin(&sys, &rkmk, &pair[1], 0.01, 100).unwrap();
    let gap = ta
        .leaf_values
        .iter()
        .zip(&tb.leaf_values)
        .map(|(a, b)| max_abs(a, b))
        .fold(0.0, f64::max);
    let moved = (&pair[0] - &pair[1]).norm_max();
    outcome(
        gap <= 1e-12 && moved > 1e-3,
        format!("max AᵀA gap {gap:.2e} (≤ 1e-12), initial states differ by {moved:.2e}"),
    )
}

fn order_suite() -> Outcome {
    let sys = builtin_system("eq1", &Params::new()).unwrap();
    let fol = sys.foliate().unwrap().clone();
    let plain = sys.plain().clone();
    let cases: Vec<(&str, Box<dyn Stepper>, f64, f64)> = vec![
        ("euler", Box::new(RungeKutta::new(ButcherTableau::euler(), plain.clone())), 1.0, 0.1),
        ("midpoint", Box::new(ImplicitMidpoint::new(plain.clone(), SolveConfig::default())), 2.0, 0.1),
        ("rk4", Box::new(RungeKutta::new(ButcherTableau::rk4(), plain)), 4.0, 0.2),
        ("lie-euler", Box::new(LieEuler::new(fol.clone())), 1.0, 0.1),
        ("rkmk4", Box::new(Rkmk::new(fol, ButcherTableau::rk4())), 4.0, 0.2),
    ];
    let x0 = Matrix::column(&[0.5, 0.5]);
    let taus = [0.1, 0.05, 0.025, 0.0125];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, s, want, tol) in &cases {
        let est = convergence_order(s.as_ref(), &x0, 1.0, &taus).unwrap();
        pass &= (est.slope - want).abs() <= *tol;
        parts.push(format!("{name} {:.3} ({want}±{tol})", est.slope));
    }
    outcome(pass, parts.join(", "))
}

fn taylor30(x: &Matrix) -> Matrix {
    let mut term = Matrix::identity(x.rows());
    let mut sum = term.clone();
    for k in 1..=30 {
        term = &(&term * x) * (1.0 / k as f64);
        sum += &term;
    }
    sum
}

fn kernel_checks() -> Outcome {
    let mut rng = SeededRng::seed_from_u64(2024);
    let random = |r: usize, c: usize, rng: &mut SeededRng| {
        Matrix::from_vec(r, c, (0..r * c).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    };
    let mut exp_err: f64 = 0.0;
    for _ in 0..100 {
        let m = random(3, 3, &mut rng);
        let scale = rng.gen_range(0.0..1.0) / m.norm_fro();
        let x = &m * scale;
        exp_err = exp_err.max((&expm(&x).unwrap() - &taylor30(&x)).norm_max());
    }
    let mut so_err: f64 = 0.0;
    for n in 2..=5 {
        for _ in 0..25 {
            let m = random(n, n, &mut rng);
            let s = &(&m - &m.transpose()) * 2.0;
            let q = expm(&s).unwrap();
            so_err = so_err.max((&(&q.transpose() * &q) - &Matrix::identity(n)).norm_max());
            so_err = so_err.max((q.det().unwrap() - 1.0).abs());
        }
    }
    let mut dexp_err: f64 = 0.0;
    let h = 1e-5;
    for _ in 0..20 {
        let m = random(3, 3, &mut rng);
        let x = &m * (0.2 / m.norm_fro());
        let y = random(3, 3, &mut rng);
        let plus = expm(&(&x + &(&y * h))).unwrap();
        let minus = expm(&(&x - &(&y * h))).unwrap();
        let deriv = &(&plus - &minus) * (0.5 / h);
        let z = &deriv * &expm(&-&x).unwrap();
        dexp_err = dexp_err.max((&dexpinv(&x, &z, 6).unwrap() - &y).norm_max());
    }
    outcome(
        exp_err <= 1e-13 && so_err <= 1e-10 && dexp_err <= 1e-6,
        format!(
            "exp vs Taylor-30 {exp_err:.2e} (≤ 1e-13), SO(n) membership {so_err:.2e} (≤ 1e-10), \
             dexp⁻¹ identity {dexp_err:.2e} (≤ 1e-6)"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, fn() -> Outcome, Option<Duration>)> = vec![
        ("linear foliation preserved by Runge–Kutta", linear_foliation_rk, Some(Duration::from_secs(1))),
        ("implicit midpoint failure coefficient", midpoint_failure_coefficient, Some(Duration::from_secs(1))),
        ("Lie–Euler vs Euler on the radius-2 circle", figure2, Some(Duration::from_secs(1))),
        ("Lorenz splitting reduced decay", lorenz_splitting, Some(Duration::from_secs(1))),
        ("projection keeps the reduced leaf value", projection, None),
        ("discrete gradient identity", discrete_gradient, None),
        ("isospectral traces", isospectral, None),
        ("Stiefel AᵀA agreement", stiefel, None),
        ("convergence order suite", order_suite, Some(Duration::from_secs(5))),
        ("matrix kernel checks", kernel_checks, None),
    ];
    let mut failures = 0;
    for (k, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let in_time = budget.map_or(true, |b| elapsed < b);
        let pass = out.pass && in_time;
        if !pass {
            failures += 1;
        }
        let budget_note = budget.map_or(String::new(), |b| format!(" < {}s", b.as_secs()));
        println!(
            "[{}] {:>2}. {name}: {}; runtime {:.3}s{budget_note}",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            out.detail,
            elapsed.as_secs_f64(),
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
