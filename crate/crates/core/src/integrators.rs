//! One-step integrators.
//!
//! Every method is available as a free function (`*_step`) and as a
//! [`Stepper`] bound to its system, which is what the trajectory and
//! experiment code consumes.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::foliation::{FoliateSystem, LeafFunction, PlainSystem, StateMap};
use crate::matgroup::{dexpinv, expm, Matrix};

/// Butcher tableau of an explicit Runge–Kutta method.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    name: String,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    order: usize,
}

impl ButcherTableau {
    /// Validates `Σbᵢ = 1`, `cᵢ = Σⱼ aᵢⱼ` and strict lower triangularity.
    pub fn new(
        name: impl Into<String>,
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        c: Vec<f64>,
        order: usize,
    ) -> Result<Self> {
        let s = b.len();
        if s == 0 || a.len() != s || c.len() != s || a.iter().any(|row| row.len() != s) {
            return Err(Error::Dimension("inconsistent tableau sizes".into()));
        }
        if (b.iter().sum::<f64>() - 1.0).abs() > 1e-14 {
            return Err(Error::Domain("tableau weights do not sum to 1".into()));
        }
        for i in 0..s {
            if (a[i].iter().sum::<f64>() - c[i]).abs() > 1e-14 {
                return Err(Error::Domain(format!("row sum {i} differs from its node")));
            }
            if a[i][i..].iter().any(|v| *v != 0.0) {
                return Err(Error::Domain("tableau is not explicit".into()));
            }
        }
        if order == 0 {
            return Err(Error::Domain("tableau order must be positive".into()));
        }
        Ok(ButcherTableau {
            name: name.into(),
            a,
            b,
            c,
            order,
        })
    }

    pub fn euler() -> Self {
        Self::new("euler", vec![vec![0.0]], vec![1.0], vec![0.0], 1).unwrap()
    }

    pub fn explicit_midpoint() -> Self {
        Self::new(
            "rk2",
            vec![vec![0.0, 0.0], vec![0.5, 0.0]],
            vec![0.0, 1.0],
            vec![0.0, 0.5],
            2,
        )
        .unwrap()
    }

    pub fn heun() -> Self {
        Self::new(
            "heun",
            vec![vec![0.0, 0.0], vec![1.0, 0.0]],
            vec![0.5, 0.5],
            vec![0.0, 1.0],
            2,
        )
        .unwrap()
    }

    pub fn kutta3() -> Self {
        Self::new(
            "rk3",
            vec![
                vec![0.0, 0.0, 0.0],
                vec![0.5, 0.0, 0.0],
                vec![-1.0, 2.0, 0.0],
            ],
            vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
            vec![0.0, 0.5, 1.0],
            3,
        )
        .unwrap()
    }

    pub fn rk4() -> Self {
        Self::new(
            "rk4",
            vec![
                vec![0.0, 0.0, 0.0, 0.0],
                vec![0.5, 0.0, 0.0, 0.0],
                vec![0.0, 0.5, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
            vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            vec![0.0, 0.5, 0.5, 1.0],
            4,
        )
        .unwrap()
    }

    pub const NAMES: [&'static str; 5] = ["euler", "rk2", "heun", "rk3", "rk4"];

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "euler" => Ok(Self::euler()),
            "rk2" | "midpoint" => Ok(Self::explicit_midpoint()),
            "heun" => Ok(Self::heun()),
            "rk3" => Ok(Self::kutta3()),
            "rk4" => Ok(Self::rk4()),
            _ => Err(Error::Catalogue {
                kind: "tableau",
                name: name.into(),
                valid: Self::NAMES.iter().map(|s| s.to_string()).collect(),
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }
}

/// Tolerances for the implicit solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tol: 1e-12,
            max_iter: 50,
        }
    }
}

impl SolveConfig {
    pub fn new(tol: f64, max_iter: usize) -> Result<Self> {
        if !(tol > 0.0) || max_iter == 0 {
            return Err(Error::Domain("solver needs tol > 0 and max_iter >= 1".into()));
        }
        Ok(SolveConfig { tol, max_iter })
    }
}

/// A one-step map bound to its vector field.
pub trait Stepper: Send + Sync {
    fn name(&self) -> &str;

    /// Classical order; exact flows report `usize::MAX`.
    fn order(&self) -> usize;

    /// Whether the step map sends leaves to leaves by construction.
    fn is_foliate(&self) -> bool;

    fn step(&self, x: &Matrix, tau: f64) -> Result<Matrix>;
}

fn finite(m: Matrix, what: impl FnOnce() -> String) -> Result<Matrix> {
    if m.is_finite() {
        Ok(m)
    } else {
        Err(Error::Divergence(what()))
    }
}

fn rk_generic(
    tab: &ButcherTableau,
    rhs: &dyn Fn(&Matrix) -> Matrix,
    x: &Matrix,
    tau: f64,
) -> Result<Matrix> {
    let mut ks: Vec<Matrix> = Vec::with_capacity(tab.stages());
    for i in 0..tab.stages() {
        let mut stage = x.clone();
        for (j, k) in ks.iter().enumerate() {
            let aij = tab.a[i][j];
            if aij != 0.0 {
                stage.axpy(tau * aij, k);
            }
        }
        let k = finite(rhs(&stage), || format!("{} stage {i}", tab.name))?;
        if k.shape() != x.shape() {
            return Err(Error::Dimension("field returned a different shape".into()));
        }
        ks.push(k);
    }
    let mut out = x.clone();
    for (bi, k) in tab.b.iter().zip(&ks) {
        if *bi != 0.0 {
            out.axpy(tau * bi, k);
        }
    }
    finite(out, || format!("{} update", tab.name))
}

/// Explicit Runge–Kutta step.
pub fn rk_step(tab: &ButcherTableau, sys: &PlainSystem, x: &Matrix, tau: f64) -> Result<Matrix> {
    rk_generic(tab, &|s| sys.rhs(s), x, tau)
}

/// Fixed-point iteration `x ← update(x)`. After the increment first drops to
/// `cfg.tol` the iteration continues until increments reach rounding level
/// relative to the iterate or stop improving for three iterations.
fn fixed_point(
    start: Matrix,
    update: &dyn Fn(&Matrix) -> Result<Matrix>,
    cfg: &SolveConfig,
) -> Result<Matrix> {
    let mut next = start;
    let mut residual = f64::INFINITY;
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        let cand = update(&next)?;
        residual = (&cand - &next).norm_max();
        next = cand;
        if residual <= 4.0 * f64::EPSILON * next.norm_max() {
            return Ok(next);
        }
        converged |= residual <= cfg.tol;
        if residual < best {
            best = residual;
            stalled = 0;
        } else {
            stalled += 1;
        }
        if converged && stalled >= 3 {
            return Ok(next);
        }
    }
    if converged {
        Ok(next)
    } else {
        Err(Error::NonConvergence {
            iterations: cfg.max_iter,
            residual,
        })
    }
}

fn midpoint_generic(
    rhs: &dyn Fn(&Matrix) -> Matrix,
    x: &Matrix,
    tau: f64,
    cfg: &SolveConfig,
) -> Result<Matrix> {
    let mut start = x.clone();
    start.axpy(tau, &rhs(x));
    fixed_point(
        start,
        &|next: &Matrix| {
            let mid = (x + next).scale(0.5);
            let mut cand = x.clone();
            cand.axpy(tau, &rhs(&mid));
            finite(cand, || "implicit midpoint iterate".into())
        },
        cfg,
    )
}

/// Implicit midpoint rule `x′ = x + τX((x+x′)/2)`, solved by fixed-point
/// iteration.
pub fn implicit_midpoint_step(
    sys: &PlainSystem,
    x: &Matrix,
    tau: f64,
    cfg: &SolveConfig,
) -> Result<Matrix> {
    midpoint_generic(&|s| sys.rhs(s), x, tau, cfg)
}

/// Lie–Euler: `x′ = λ(exp(τ a(x)), x + τ f(x))`.
pub fn lie_euler_step(sys: &FoliateSystem, x: &Matrix, tau: f64) -> Result<Matrix> {
    let a = sys.tangent_generator(x);
    let g = expm(&a.scale(tau))?;
    let mut m = x.clone();
    m.axpy(tau, &sys.invariant_field(x));
    let m = finite(m, || "lie-euler invariant update".into())?;
    let out = sys.action().act_raw(&g, &m)?;
    finite(out, || "lie-euler update".into())
}

/// Runge–Kutta–Munthe-Kaas step on the lifted system over `G × M`.
///
/// The `M` stages are classical RK stages of `ṁ = f(m)`; the group stages are
/// `gᵢ = exp(Ωᵢ)` with `Ωᵢ = τ Σⱼ aᵢⱼ dexp⁻¹_{Ωⱼ}(a(λ(gⱼ, mⱼ)))`. The result is
/// `λ(exp(Ω₁), m₁)`.
pub fn rkmk_step(
    sys: &FoliateSystem,
    tab: &ButcherTableau,
    x: &Matrix,
    tau: f64,
) -> Result<Matrix> {
    let action = sys.action();
    let n = action.matrix_size();
    let order = tab.order().clamp(1, 6);
    let s = tab.stages();
    let mut km: Vec<Matrix> = Vec::with_capacity(s);
    let mut kg: Vec<Matrix> = Vec::with_capacity(s);
    for i in 0..s {
        let mut m = x.clone();
        let mut omega = Matrix::zeros(n, n);
        let mut moved = false;
        for j in 0..i {
            let aij = tab.a[i][j];
            if aij != 0.0 {
                m.axpy(tau * aij, &km[j]);
                omega.axpy(tau * aij, &kg[j]);
                moved = true;
            }
        }
        let stage_x = if moved {
            action.act_raw(&expm(&omega)?, &m)?
        } else {
            m.clone()
        };
        let xi = sys.tangent_generator(&stage_x);
        let kgi = finite(dexpinv(&omega, &xi, order)?, || format!("rkmk stage {i} (group)"))?;
        let kmi = finite(sys.invariant_field(&m), || format!("rkmk stage {i} (invariant)"))?;
        kg.push(kgi);
        km.push(kmi);
    }
    let mut omega = Matrix::zeros(n, n);
    let mut m = x.clone();
    for ((bi, g), f) in tab.b.iter().zip(&kg).zip(&km) {
        if *bi != 0.0 {
            omega.axpy(tau * bi, g);
            m.axpy(tau * bi, f);
        }
    }
    let out = action.act_raw(&expm(&omega)?, &m)?;
    finite(out, || "rkmk update".into())
}

/// Orthogonal projection of `x̃` onto `I⁻¹(target)`:
/// `x = x̃ + dI(x̃)ᵀμ` with Newton iteration on `μ`.
pub fn project_onto_leaf(
    leaf: &LeafFunction,
    x_tilde: &Matrix,
    target: &[f64],
    cfg: &SolveConfig,
) -> Result<Matrix> {
    let k = leaf.dim();
    let j0 = leaf.jacobian(x_tilde);
    if !leaf_rank_full(&j0) {
        return Err(Error::SingularLeaf(
            "leaf-function Jacobian is rank deficient at the projected point".into(),
        ));
    }
    let j0t = j0.transpose();
    let defect = |x: &Matrix| -> (Vec<f64>, f64) {
        let f: Vec<f64> = leaf.value(x).iter().zip(target).map(|(a, b)| a - b).collect();
        let r = f.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        (f, r)
    };
    let newton = |x: &Matrix, f: &[f64], mu: &mut Matrix| -> Result<Matrix> {
        let jac = &leaf.jacobian(x) * &j0t;
        let delta = jac
            .solve(&Matrix::column(f))
            .map_err(|_| Error::SingularLeaf("projection Newton matrix is singular".into()))?;
        mu.axpy(-1.0, &delta);
        Ok(x_tilde + &(&j0t * &*mu).reshape(x_tilde.rows(), x_tilde.cols())?)
    };
    let mut mu = Matrix::zeros(k, 1);
    let mut x = x_tilde.clone();
    let mut residual = f64::INFINITY;
    for _ in 0..=cfg.max_iter {
        let (f, r) = defect(&x);
        residual = r;
        if !residual.is_finite() {
            return Err(Error::Divergence("projection iterate".into()));
        }
        if residual <= cfg.tol {
            if residual == 0.0 {
                return Ok(x);
            }
            // One more correction: the quadratic convergence takes the
            // residual down to rounding level.
            let polished = newton(&x, &f, &mut mu)?;
            let (_, rp) = defect(&polished);
            return Ok(if rp < residual { polished } else { x });
        }
        x = newton(&x, &f, &mut mu)?;
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iter,
        residual,
    })
}

fn leaf_rank_full(jac: &Matrix) -> bool {
    // Gram–Schmidt over the rows with rank tolerance 1e-10.
    let scale = (0..jac.rows())
        .map(|i| jac.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(1.0, f64::max);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for i in 0..jac.rows() {
        let mut v = jac.row(i).to_vec();
        for q in &basis {
            let c: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= c * qi;
            }
        }
        let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nv <= 1e-10 * scale {
            return false;
        }
        basis.push(v.into_iter().map(|a| a / nv).collect());
    }
    true
}

/// Projection method: reduced step for the leaf value, inner step for the
/// state, then orthogonal projection onto the new leaf. Returns the new state
/// and the new leaf value.
pub fn projection_step(
    leaf: &LeafFunction,
    inner: &dyn Stepper,
    reduced: &dyn Stepper,
    x: &Matrix,
    leaf_value: &[f64],
    tau: f64,
    cfg: &SolveConfig,
) -> Result<(Matrix, Vec<f64>)> {
    if leaf_value.len() != leaf.dim() {
        return Err(Error::Dimension("leaf value has the wrong length".into()));
    }
    if !leaf_rank_full(&leaf.jacobian(x)) {
        return Err(Error::SingularLeaf("leaf-function Jacobian is rank deficient".into()));
    }
    let next_leaf = reduced.step(&Matrix::column(leaf_value), tau)?.into_vec();
    let x_tilde = inner.step(x, tau)?;
    let x_next = project_onto_leaf(leaf, &x_tilde, &next_leaf, cfg)?;
    Ok((x_next, next_leaf))
}

/// Codimension-one field written as `ẋ = (A(x) + h(I)/|∇I|²)∇I` with `A`
/// antisymmetric. States are column vectors.
#[derive(Clone)]
pub struct GradientForm {
    name: String,
    skew: StateMap,
    invariant: Arc<dyn Fn(&Matrix) -> f64 + Send + Sync>,
    gradient: StateMap,
    reduced: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for GradientForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GradientForm").field("name", &self.name).finish()
    }
}

impl GradientForm {
    pub fn new(
        name: impl Into<String>,
        skew: impl Fn(&Matrix) -> Matrix + Send + Sync + 'static,
        invariant: impl Fn(&Matrix) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&Matrix) -> Matrix + Send + Sync + 'static,
        reduced: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        GradientForm {
            name: name.into(),
            skew: Arc::new(skew),
            invariant: Arc::new(invariant),
            gradient: Arc::new(gradient),
            reduced: Arc::new(reduced),
        }
    }

    /// Same form with `h ≡ 0`.
    pub fn without_reduced_flow(&self) -> Self {
        GradientForm {
            name: format!("{}/h=0", self.name),
            reduced: Arc::new(|_| 0.0),
            ..self.clone()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn invariant(&self, x: &Matrix) -> f64 {
        (self.invariant)(x)
    }

    pub fn reduced(&self, i: f64) -> f64 {
        (self.reduced)(i)
    }

    pub fn skew(&self, x: &Matrix) -> Matrix {
        (self.skew)(x)
    }

    pub fn gradient(&self, x: &Matrix) -> Matrix {
        (self.gradient)(x)
    }

    /// The continuous field `(A(x) + h(I)/|∇I|²)∇I`.
    pub fn field(&self, x: &Matrix) -> Matrix {
        let g = self.gradient(x);
        let mut v = &self.skew(x) * &g;
        v.axpy(self.reduced(self.invariant(x)) / g.dot(&g), &g);
        v
    }

    /// Midpoint-type discrete gradient `∇̄I(x, x′)`.
    pub fn discrete_gradient(&self, x: &Matrix, xp: &Matrix) -> Matrix {
        let mid = (x + xp).scale(0.5);
        let mut g = self.gradient(&mid);
        let d = xp - x;
        let dd = d.dot(&d);
        if dd > 1e-16 {
            let corr = (self.invariant(xp) - self.invariant(x) - g.dot(&d)) / dd;
            g.axpy(corr, &d);
        }
        g
    }

    /// `h̄(u, v) = h((u+v)/2)`.
    pub fn reduced_bar(&self, u: f64, v: f64) -> f64 {
        self.reduced(0.5 * (u + v))
    }
}

/// Discrete-gradient step; the result satisfies
/// `I(x′) − I(x) = τ h̄(I(x), I(x′))` up to the solver tolerance.
pub fn discrete_gradient_step(
    form: &GradientForm,
    x: &Matrix,
    tau: f64,
    cfg: &SolveConfig,
) -> Result<Matrix> {
    if tau == 0.0 {
        return Ok(x.clone());
    }
    let ix = form.invariant(x);
    let update = |xp: &Matrix| -> Result<Matrix> {
        let g = form.discrete_gradient(x, xp);
        let gg = g.dot(&g);
        if !(gg > 1e-300) {
            return Err(Error::SingularLeaf("discrete gradient vanishes".into()));
        }
        let mid = (x + xp).scale(0.5);
        let hbar = form.reduced_bar(ix, form.invariant(xp));
        let mut v = &form.skew(&mid) * &g;
        v.axpy(hbar / gg, &g);
        let mut out = x.clone();
        out.axpy(tau, &v);
        finite(out, || "discrete gradient iterate".into())
    };
    if !(form.gradient(x).norm_fro() > 0.0) {
        return Err(Error::SingularLeaf("gradient of the leaf function vanishes".into()));
    }
    let mut start = x.clone();
    start.axpy(tau, &finite(form.field(x), || "discrete gradient predictor".into())?);
    fixed_point(start, &update, cfg)
}

/// Order of sub-steps in a splitting method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Composition {
    /// Parts applied in order, each for the full step.
    Sequential,
    /// Parts at `τ/2` in order, then at `τ/2` in reverse order.
    Strang,
}

/// Composes the parts over one step.
pub fn splitting_step(
    parts: &[Arc<dyn Stepper>],
    composition: Composition,
    x: &Matrix,
    tau: f64,
) -> Result<Matrix> {
    let mut y = x.clone();
    match composition {
        Composition::Sequential => {
            for p in parts {
                y = p.step(&y, tau)?;
            }
        }
        Composition::Strang => {
            for p in parts {
                y = p.step(&y, 0.5 * tau)?;
            }
            for p in parts.iter().rev() {
                y = p.step(&y, 0.5 * tau)?;
            }
        }
    }
    Ok(y)
}

/// Exact flow of `ẋ = Λx`: `exp(τΛ)x`.
pub fn exact_linear_step(lambda: &Matrix, x: &Matrix, tau: f64) -> Result<Matrix> {
    if !lambda.is_square() || lambda.cols() != x.rows() {
        return Err(Error::Dimension(format!(
            "linear field {:?} for state {:?}",
            lambda.shape(),
            x.shape()
        )));
    }
    expm(&lambda.scale(tau))?.try_mul(x)
}

/// Explicit Runge–Kutta stepper.
#[derive(Debug, Clone)]
pub struct RungeKutta {
    tableau: ButcherTableau,
    system: PlainSystem,
    name: String,
}

impl RungeKutta {
    pub fn new(tableau: ButcherTableau, system: PlainSystem) -> Self {
        let name = tableau.name().to_string();
        RungeKutta {
            tableau,
            system,
            name,
        }
    }
}

impl Stepper for RungeKutta {
    fn name(&self) -> &str {
        &self.name
    }
    fn order(&self) -> usize {
        self.tableau.order()
    }
    fn is_foliate(&self) -> bool {
        false
    }
    fn step(&self, x: &Matrix, tau: f64) -> Result<Matrix> {
        rk_step(&self.tableau, &self.system, x, tau)
    }
}

/// Implicit midpoint stepper.
#[derive(Debug, Clone)]
pub struct ImplicitMidpoint {
    system: PlainSystem,
    cfg: SolveConfig,
    foliate: bool,
}

impl ImplicitMidpoint {
    pub fn new(system: PlainSystem, cfg: SolveConfig) -> Self {
        ImplicitMidpoint {
            system,
            cfg,
            foliate: false,
        }
    }

    /// Marks the stepper foliate, for fields tangent to a quadratic
    /// foliation (where midpoint preserves the leaf function).
    pub fn marked_foliate(mut self) -> Self {
        self.foliate = true;
        self
    }
}

impl Stepper for ImplicitMidpoint {
    fn name(&self) -> &str {
        "midpoint"
    }
    fn order(&self) -> usize {
        2
    }
    fn is_foliate(&self) -> bool {
        self.foliate
    }
    fn step(&self, x: &Matrix, tau: f64) -> Result<Matrix> {
        implicit_midpoint_step(&self.system, x, tau, &self.cfg)
    }
}

/// Lie–Euler stepper.
#[derive(Debug, Clone)]
pub struct LieEuler {
    system: FoliateSystem,
}

impl LieEuler {
    pub fn new(system: FoliateSystem) -> Self {
        LieEuler { system }
    }
}

impl Stepper for LieEuler {
    fn name(&self) -> &str {
        "lie-euler"
    }
    fn order(&self) -> usize {
        1
    }
    fn is_foliate(&self) -> bool {
        true
    }
    fn step(&self, x: &Matrix, tau: f64) -> Result<Matrix> {
        lie_euler_step(&self.system, x, tau)
    }
}

/// RKMK stepper on `G × M`.
#[derive(Debug, Clone)]
pub struct Rkmk {
    system: FoliateSystem,
    tableau: ButcherTableau,
    name: String,
}

impl Rkmk {
    pub fn new(system: FoliateSystem, tableau: ButcherTableau) -> Self {
        let name = format!("rkmk-{}", tableau.name());
        Rkmk {
            system,
            tableau,
            name,
        }
    }
}

impl Stepper for Rkmk {
    fn name(&self) -> &str {
        &self.name
    }
    fn order(&self) -> usize {
        self.tableau.order()
    }
    fn is_foliate(&self) -> bool {
        true
    }
    fn step(&self, x: &Matrix, tau: f64) -> Result<Matrix> {
        rkmk_step(&self.system, &self.tableau, x, tau)
    }
}

/// Projection stepper; the leaf value is recomputed from the state each step.
#[derive(Clone)]
pub struct Projection {
    leaf: LeafFunction,
    inner: Arc<dyn Stepper>,
    reduced: Arc<dyn Stepper>,
    cfg: SolveConfig,
}

impl fmt::Debug for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Projection")
            .field("inner", &self.inner.name())
            .field("reduced", &self.reduced.name())
            .finish()
    }
}

impl Projection {
    pub fn new(
        leaf: LeafFunction,
        inner: Arc<dyn Stepper>,
        reduced: Arc<dyn Stepper>,
        cfg: SolveConfig,
    ) -> Self {
        Projection {
            leaf,
            inner,
            reduced,
            cfg,
        }
    }

    /// Inner and reduced steppers share the tableau; the reduced one runs on
    /// `İ = h(I)` over `k × 1` columns.
    pub fn with_tableau(
        system: &PlainSystem,
        tableau: ButcherTableau,
        cfg: SolveConfig,
    ) -> Result<Self> {
        let leaf = system
            .leaf()
            .cloned()
            .ok_or_else(|| Error::Config(format!("{} has no leaf function", system.name())))?;
        let h = system
            .reduced()
            .cloned()
            .ok_or_else(|| Error::Config(format!("{} has no reduced field", system.name())))?;
        let reduced_sys = PlainSystem::new(
            format!("{}/reduced", system.name()),
            (leaf.dim(), 1),
            move |i: &Matrix| Matrix::column(&h(i.as_slice())),
        );
        Ok(Projection {
            leaf,
            inner: Arc::new(RungeKutta::new(tableau.clone(), system.clone())),
            reduced: Arc::new(RungeKutta::new(tableau, reduced_sys)),
            cfg,
        })
    }

    pub fn leaf(&self) -> &LeafFunction {
        &self.leaf
    }

    /// One step carrying the reduced leaf value explicitly.
    pub fn step_with_leaf(
        &self,
        x: &Matrix,
        leaf_value: &[f64],
        tau: f64,
    ) -> Result<(Matrix, Vec<f64>)> {
        projection_step(
            &self.leaf,
            self.inner.as_ref(),
            self.reduced.as_ref(),
            x,
            leaf_value,
            tau,
            &self.cfg,
        )
    }
}

impl Stepper for Projection {
    fn name(&self) -> &str {
        "projection"
    }
    fn order(&self) -> usize {
        self.inner.order().min(self.reduced.order())
    }
    fn is_foliate(&self) -> bool {
        true
    }
    fn step(&self, x: &Matrix, tau: f64) -> Result<Matrix> {
        let i = self.leaf.value(x);
        Ok(self.step_with_leaf(x, &i, tau)?.0)
    }
}

/// Discrete-gradient stepper.
#[derive(Debug, Clone)]
pub struct DiscreteGradient {
    form: GradientForm,
    cfg: SolveConfig,
}

impl DiscreteGradient {
    pub fn new(form: GradientForm, cfg: SolveConfig) -> Self {
        DiscreteGradient { form, cfg }
    }

    pub fn form(&self) -> &GradientForm {
        &self.form
    }
}

impl Stepper for DiscreteGradient {
    fn name(&self) -> &str {
        "discrete-gradient"
    }
    fn order(&self) -> usize {
        2
    }
    fn is_foliate(&self) -> bool {
        true
    }
    fn step(&self, x: &Matrix, tau: f64) -> Result<Matrix> {
        discrete_gradient_step(&self.form, x, tau, &self.cfg)
    }
}

/// Composition of steppers.
#[derive(Clone)]
pub struct Splitting {
    name: String,
    parts: Vec<Arc<dyn Stepper>>,
    composition: Composition,
}

impl fmt::Debug for Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.parts.iter().map(|p| p.name()).collect();
        f.debug_struct("Splitting")
            .field("name", &self.name)
            .field("parts", &parts)
            .field("composition", &self.composition)
            .finish()
    }
}

impl Splitting {
    pub fn new(
        name: impl Into<String>,
        parts: Vec<Arc<dyn Stepper>>,
        composition: Composition,
    ) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Domain("splitting needs at least one part".into()));
        }
        Ok(Splitting {
            name: name.into(),
            parts,
            composition,
        })
    }
}

impl Stepper for Splitting {
    fn name(&self) -> &str {
        &self.name
    }
    fn order(&self) -> usize {
        let inner = self.parts.iter().map(|p| p.order()).min().unwrap_or(1);
        if self.parts.len() == 1 {
            return inner;
        }
        match self.composition {
            Composition::Sequential => inner.min(1),
            Composition::Strang => inner.min(2),
        }
    }
    fn is_foliate(&self) -> bool {
        self.parts.iter().all(|p| p.is_foliate())
    }
    fn step(&self, x: &Matrix, tau: f64) -> Result<Matrix> {
        splitting_step(&self.parts, self.composition, x, tau)
    }
}

/// Exact flow of a linear field.
#[derive(Debug, Clone)]
pub struct ExactLinear {
    lambda: Matrix,
    foliate: bool,
}

impl ExactLinear {
    pub fn new(lambda: Matrix) -> Result<Self> {
        if !lambda.is_square() {
            return Err(Error::Dimension("linear field must be square".into()));
        }
        Ok(ExactLinear {
            lambda,
            foliate: false,
        })
    }

    pub fn marked_foliate(mut self) -> Self {
        self.foliate = true;
        self
    }
}

impl Stepper for ExactLinear {
    fn name(&self) -> &str {
        "exact-linear"
    }
    fn order(&self) -> usize {
        usize::MAX
    }
    fn is_foliate(&self) -> bool {
        self.foliate
    }
    fn step(&self, x: &Matrix, tau: f64) -> Result<Matrix> {
        exact_linear_step(&self.lambda, x, tau)
    }
}
