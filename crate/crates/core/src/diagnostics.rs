//! Trajectories, leaf drift, convergence order and the figure experiments.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::foliation::LeafFunction;
use crate::integrators::{
    implicit_midpoint_step, ButcherTableau, LieEuler, RungeKutta, SolveConfig, Stepper,
};
use crate::matgroup::Matrix;
use crate::systems::{builtin_system, BuiltinSystem, Params};

/// A discrete orbit with its leaf-function series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Matrix>,
    pub leaf_values: Vec<Vec<f64>>,
    pub method: String,
    pub system: String,
    pub tau: f64,
}

impl Trajectory {
    /// Number of steps taken (states minus one).
    pub fn steps(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn last(&self) -> &Matrix {
        self.states.last().expect("trajectory has an initial state")
    }
}

/// Runs `stepper` for `steps` steps from `x0`, recording `I(xₙ)`.
pub fn integrate(
    system: &str,
    leaf: &LeafFunction,
    stepper: &dyn Stepper,
    x0: &Matrix,
    tau: f64,
    steps: usize,
) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::Domain("steps must be >= 1".into()));
    }
    if !tau.is_finite() {
        return Err(Error::Domain("step size must be finite".into()));
    }
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut leaf_values = Vec::with_capacity(steps + 1);
    let mut x = x0.clone();
    times.push(0.0);
    leaf_values.push(leaf.value(&x));
    states.push(x.clone());
    for n in 0..steps {
        x = stepper.step(&x, tau).map_err(|e| Error::AtStep {
            step: n + 1,
            source: Box::new(e),
        })?;
        times.push((n + 1) as f64 * tau);
        leaf_values.push(leaf.value(&x));
        states.push(x.clone());
    }
    Ok(Trajectory {
        times,
        states,
        leaf_values,
        method: stepper.name().to_string(),
        system: system.to_string(),
        tau,
    })
}

/// Convenience wrapper for catalogue systems.
pub fn integrate_builtin(
    sys: &BuiltinSystem,
    stepper: &dyn Stepper,
    x0: &Matrix,
    tau: f64,
    steps: usize,
) -> Result<Trajectory> {
    integrate(sys.name(), sys.leaf(), stepper, x0, tau, steps)
}

/// Leaf drift relative to a nominal reduced update.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftReport {
    pub per_step_drift: Vec<f64>,
    pub max_drift: f64,
    pub spread_across_leaf: f64,
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()))
}

/// `‖I(xₙ₊₁) − Φ(I(xₙ))‖_∞` per step.
pub fn leaf_drift(traj: &Trajectory, reduced_update: &dyn Fn(&[f64]) -> Vec<f64>) -> DriftReport {
    let per_step_drift: Vec<f64> = traj
        .leaf_values
        .windows(2)
        .map(|w| max_abs_diff(&w[1], &reduced_update(&w[0])))
        .collect();
    let max_drift = per_step_drift.iter().copied().fold(0.0, f64::max);
    DriftReport {
        per_step_drift,
        max_drift,
        spread_across_leaf: 0.0,
    }
}

/// Drift over a co-leaf bundle: per-step drift is the worst member, spread is
/// the worst per-step spread.
pub fn bundle_drift(
    bundle: &[Trajectory],
    reduced_update: &dyn Fn(&[f64]) -> Vec<f64>,
) -> DriftReport {
    let mut per_step_drift: Vec<f64> = Vec::new();
    for t in bundle {
        let r = leaf_drift(t, reduced_update);
        if per_step_drift.len() < r.per_step_drift.len() {
            per_step_drift.resize(r.per_step_drift.len(), 0.0);
        }
        for (a, b) in per_step_drift.iter_mut().zip(r.per_step_drift) {
            *a = a.max(b);
        }
    }
    let max_drift = per_step_drift.iter().copied().fold(0.0, f64::max);
    let spread_across_leaf = leaf_spread(bundle).into_iter().fold(0.0, f64::max);
    DriftReport {
        per_step_drift,
        max_drift,
        spread_across_leaf,
    }
}

/// Per-step spread `max − min` of the leaf values across a bundle (worst
/// component), starting at step 0.
pub fn leaf_spread(bundle: &[Trajectory]) -> Vec<f64> {
    let len = bundle.iter().map(|t| t.leaf_values.len()).min().unwrap_or(0);
    (0..len)
        .map(|n| {
            let k = bundle[0].leaf_values[n].len();
            (0..k)
                .map(|c| {
                    let (lo, hi) = bundle.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
                        let v = t.leaf_values[n][c];
                        (lo.min(v), hi.max(v))
                    });
                    hi - lo
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Explicit Euler map of the reduced field, `I ↦ I + τh(I)`.
pub fn reduced_euler(
    h: impl Fn(&[f64]) -> Vec<f64>,
    tau: f64,
) -> impl Fn(&[f64]) -> Vec<f64> {
    move |i: &[f64]| i.iter().zip(h(i)).map(|(a, b)| a + tau * b).collect()
}

/// Runge–Kutta map of the reduced field.
pub fn reduced_rk(
    tab: ButcherTableau,
    h: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    k: usize,
    tau: f64,
) -> impl Fn(&[f64]) -> Vec<f64> {
    let sys = crate::foliation::PlainSystem::new("reduced", (k, 1), move |i: &Matrix| {
        Matrix::column(&h(i.as_slice()))
    });
    move |i: &[f64]| {
        crate::integrators::rk_step(&tab, &sys, &Matrix::column(i), tau)
            .map(Matrix::into_vec)
            .unwrap_or_else(|_| vec![f64::NAN; i.len()])
    }
}

/// Runs one stepper over a co-leaf bundle of size `count` around `x0` and
/// returns the per-step leaf spread.
pub fn co_leaf_spread(
    sys: &BuiltinSystem,
    stepper: &dyn Stepper,
    x0: &Matrix,
    count: usize,
    tau: f64,
    steps: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let bundle = sys
        .leaf_bundle(x0, count, seed)
        .iter()
        .map(|x| integrate_builtin(sys, stepper, x, tau, steps))
        .collect::<Result<Vec<_>>>()?;
    Ok(leaf_spread(&bundle))
}

/// Result of a self-convergence study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub taus: Vec<f64>,
    pub errors: Vec<f64>,
    /// Slope between consecutive step sizes; the first entry is NaN.
    pub local_slopes: Vec<f64>,
    pub slope: f64,
}

/// Least-squares slope of `log error` against `log τ`.
pub fn fit_slope(taus: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn steps_for(t_final: f64, tau: f64) -> Result<usize> {
    let n = t_final / tau;
    let r = n.round();
    if r < 1.0 || (n - r).abs() > 1e-9 * r.max(1.0) {
        return Err(Error::Domain(format!(
            "final time {t_final} is not an integer multiple of {tau}"
        )));
    }
    Ok(r as usize)
}

fn advance(stepper: &dyn Stepper, x0: &Matrix, tau: f64, steps: usize) -> Result<Matrix> {
    let mut x = x0.clone();
    for n in 0..steps {
        x = stepper.step(&x, tau).map_err(|e| Error::AtStep {
            step: n + 1,
            source: Box::new(e),
        })?;
    }
    Ok(x)
}

/// Self-convergence order: errors at `T` against the same stepper at
/// `τ_min/16`.
pub fn convergence_order(
    stepper: &dyn Stepper,
    x0: &Matrix,
    t_final: f64,
    taus: &[f64],
) -> Result<OrderEstimate> {
    convergence_order_with_reference(stepper, stepper, x0, t_final, taus)
}

/// Convergence order against a separate reference stepper run at `τ_min/16`.
pub fn convergence_order_with_reference(
    stepper: &dyn Stepper,
    reference: &dyn Stepper,
    x0: &Matrix,
    t_final: f64,
    taus: &[f64],
) -> Result<OrderEstimate> {
    if taus.len() < 3 {
        return Err(Error::Domain("need at least three step sizes".into()));
    }
    if taus.windows(2).any(|w| w[1] >= w[0]) || taus.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::Domain("step sizes must be positive and decreasing".into()));
    }
    let tau_ref = taus[taus.len() - 1] / 16.0;
    let x_ref = advance(reference, x0, tau_ref, steps_for(t_final, tau_ref)?)?;
    let mut errors = Vec::with_capacity(taus.len());
    for &tau in taus {
        let x = advance(stepper, x0, tau, steps_for(t_final, tau)?)?;
        errors.push((&x - &x_ref).norm_fro());
    }
    if errors[0] < 1e-13 {
        return Err(Error::PrecisionFloor { error: errors[0] });
    }
    let mut local_slopes = vec![f64::NAN];
    for i in 1..taus.len() {
        local_slopes.push((errors[i - 1] / errors[i]).ln() / (taus[i - 1] / taus[i]).ln());
    }
    let slope = fit_slope(taus, &errors);
    Ok(OrderEstimate {
        taus: taus.to_vec(),
        errors,
        local_slopes,
        slope,
    })
}

/// `c(τ) = (r′² − r²(1+2τ+2τ²)) / (r²τ³)` for one implicit midpoint step of
/// the `eq2` field from `x0`.
pub fn midpoint_coefficient_series(x0: &Matrix, taus: &[f64]) -> Result<Vec<f64>> {
    let r2 = x0.dot(x0);
    if r2 == 0.0 {
        return Err(Error::Domain("initial point must be nonzero".into()));
    }
    let sys = builtin_system("eq2", &Params::new())?;
    let cfg = SolveConfig::new(1e-15, 200)?;
    taus.iter()
        .map(|&tau| {
            let xp = implicit_midpoint_step(sys.plain(), x0, tau, &cfg)?;
            let rp2 = xp.dot(&xp);
            Ok((rp2 - r2 * (1.0 + 2.0 * tau + 2.0 * tau * tau)) / (r2 * tau.powi(3)))
        })
        .collect()
}

/// Extrapolated `lim_{τ→0} c(τ)`, eliminating the first-order term with the
/// two smallest step sizes. Compare with `(3 − y₀²)/2`.
pub fn midpoint_coefficient(x0: &Matrix, taus: &[f64]) -> Result<f64> {
    if taus.len() < 2 {
        return Err(Error::Domain("need at least two step sizes".into()));
    }
    let mut sorted = taus.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let (ta, tb) = (sorted[0], sorted[1]);
    if ta == tb || !(ta > 0.0) {
        return Err(Error::Domain("step sizes must be distinct and positive".into()));
    }
    let c = midpoint_coefficient_series(x0, &[ta, tb])?;
    Ok((tb * c[0] - ta * c[1]) / (tb - ta))
}

/// Lie–Euler vs explicit Euler on `eq1` from a circle of initial conditions.
#[derive(Debug, Clone, Serialize)]
pub struct Figure2Data {
    pub initial_conditions: Vec<Matrix>,
    pub lie_euler: Vec<Trajectory>,
    pub euler: Vec<Trajectory>,
    pub lie_euler_spread: Vec<f64>,
    pub euler_spread: Vec<f64>,
}

/// `n` points at angles `2πj/n` on a circle.
pub fn circle_points(radius: f64, n: usize) -> Vec<Matrix> {
    (0..n)
        .map(|j| {
            let th = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            Matrix::column(&[radius * th.cos(), radius * th.sin()])
        })
        .collect()
}

pub fn figure2_experiment(tau: f64, steps: usize, n_ics: usize, radius: f64) -> Result<Figure2Data> {
    let sys = builtin_system("eq1", &Params::new())?;
    let lie = LieEuler::new(sys.foliate().expect("eq1 is split").clone());
    let euler = RungeKutta::new(ButcherTableau::euler(), sys.plain().clone());
    let ics = circle_points(radius, n_ics);
    let run = |s: &dyn Stepper| -> Result<Vec<Trajectory>> {
        ics.iter()
            .map(|x| integrate_builtin(&sys, s, x, tau, steps))
            .collect()
    };
    let lie_euler = run(&lie)?;
    let euler = run(&euler)?;
    Ok(Figure2Data {
        initial_conditions: ics,
        lie_euler_spread: leaf_spread(&lie_euler),
        euler_spread: leaf_spread(&euler),
        lie_euler,
        euler,
    })
}

/// Sampling grid over `[lo, hi]²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub points_per_axis: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points_per_axis: 21,
            lo: -2.0,
            hi: 2.0,
        }
    }
}

impl GridSpec {
    pub fn points(&self) -> Vec<(f64, f64)> {
        let n = self.points_per_axis.max(2);
        let h = (self.hi - self.lo) / (n - 1) as f64;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push((self.lo + i as f64 * h, self.lo + j as f64 * h));
            }
        }
        out
    }
}

/// Flow position of one seed point at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowDot {
    pub seed: usize,
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// Sampled field plus flow dots for one planar system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldDataset {
    pub system: String,
    /// `(x, y, ẋ, ẏ)` per grid point.
    pub samples: Vec<[f64; 4]>,
    pub dots: Vec<FlowDot>,
    /// Largest `|dI·X − h(I)|` over the grid.
    pub consistency_residual: f64,
}

/// Dot times for the flow markers.
pub const FIGURE1_DOT_TIMES: [f64; 3] = [0.0, 0.5, 1.0];

/// Samples `eq1`, `fig1-middle` and `fig1-bottom` on the grid; flow dots
/// start on circles of radius 0.5, 1 and 1.5 (12 angles each) and are
/// advanced with RK4 at `τ = 10⁻³`.
pub fn figure1_fields(grid: &GridSpec) -> Result<Vec<FieldDataset>> {
    let mut seeds = Vec::new();
    for r in [0.5, 1.0, 1.5] {
        seeds.extend(circle_points(r, 12));
    }
    ["eq1", "fig1-middle", "fig1-bottom"]
        .iter()
        .map(|name| {
            let sys = builtin_system(name, &Params::new())?;
            let mut samples = Vec::new();
            let mut worst: f64 = 0.0;
            for (x, y) in grid.points() {
                let p = Matrix::column(&[x, y]);
                let v = sys.plain().rhs(&p);
                samples.push([x, y, v[(0, 0)], v[(1, 0)]]);
                let lhs = sys.leaf().derivative(&p, &v)[0];
                let rhs = sys.reduced_rhs(&sys.leaf_value(&p))[0];
                worst = worst.max((lhs - rhs).abs());
            }
            let rk4 = RungeKutta::new(ButcherTableau::rk4(), sys.plain().clone());
            let tau = 1e-3;
            let mut dots = Vec::new();
            for (k, s) in seeds.iter().enumerate() {
                let mut x = s.clone();
                let mut t_now = 0.0;
                for &t in &FIGURE1_DOT_TIMES {
                    let n = ((t - t_now) / tau).round() as usize;
                    x = advance(&rk4, &x, tau, n)?;
                    t_now = t;
                    dots.push(FlowDot {
                        seed: k,
                        t,
                        x: x[(0, 0)],
                        y: x[(1, 0)],
                    });
                }
            }
            Ok(FieldDataset {
                system: name.to_string(),
                samples,
                dots,
                consistency_residual: worst,
            })
        })
        .collect()
}
