//! Group actions, leaf functions and foliate vector fields.
//!
//! A foliate field is carried in split form `X(x) = a(x)_M(x) + f(x)`: a
//! tangent generator `a: M → 𝔤` pushed through the infinitesimal action, plus
//! an equivariant field `f`. Leaves are orbits of the action; the leaf
//! function `I` and reduced field `h` describe the induced dynamics
//! `İ = h(I)` on the space of leaves.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::matgroup::{
    commutator, exp_algebra, Algebra, AlgebraElement, Group, GroupElement, Matrix,
};
use crate::SeededRng;

/// Map from states to states (vector fields, algebra-valued generators).
pub type StateMap = Arc<dyn Fn(&Matrix) -> Matrix + Send + Sync>;
/// Leaf function values `I(x) ∈ ℝᵏ`.
pub type LeafMap = Arc<dyn Fn(&Matrix) -> Vec<f64> + Send + Sync>;
/// Reduced dynamics `h: ℝᵏ → ℝᵏ`.
pub type ReducedMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
/// Produces a second point on the leaf of the given point.
pub type CoLeafMap = Arc<dyn Fn(&Matrix, &mut SeededRng) -> Matrix + Send + Sync>;

/// Linear actions of matrix groups on matrix-shaped state spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupAction {
    /// SO(2) rotating ℝ² (states are 2×1 columns).
    Rotation,
    /// `λ(U, A) = U A` on `n × p` matrices.
    LeftMultiplication { n: usize, p: usize, group: Group },
    /// `λ(U, L) = U L U⁻¹` on `n × n` matrices.
    Adjoint { n: usize, group: Group },
}

impl GroupAction {
    pub fn group(&self) -> Group {
        match *self {
            GroupAction::Rotation => Group::So,
            GroupAction::LeftMultiplication { group, .. } | GroupAction::Adjoint { group, .. } => {
                group
            }
        }
    }

    pub fn algebra(&self) -> Algebra {
        self.group().algebra()
    }

    /// Size `n` of the acting matrices.
    pub fn matrix_size(&self) -> usize {
        match *self {
            GroupAction::Rotation => 2,
            GroupAction::LeftMultiplication { n, .. } | GroupAction::Adjoint { n, .. } => n,
        }
    }

    pub fn group_dim(&self) -> usize {
        self.algebra().dim(self.matrix_size())
    }

    pub fn state_shape(&self) -> (usize, usize) {
        match *self {
            GroupAction::Rotation => (2, 1),
            GroupAction::LeftMultiplication { n, p, .. } => (n, p),
            GroupAction::Adjoint { n, .. } => (n, n),
        }
    }

    fn check_state(&self, x: &Matrix) -> Result<()> {
        if x.shape() != self.state_shape() {
            return Err(Error::Domain(format!(
                "state of shape {:?} for an action on {:?}",
                x.shape(),
                self.state_shape()
            )));
        }
        Ok(())
    }

    /// `λ(g, x)`.
    pub fn evaluate(&self, g: &GroupElement, x: &Matrix) -> Result<Matrix> {
        self.check_state(x)?;
        if g.mat().rows() != self.matrix_size() {
            return Err(Error::Domain("group element of the wrong size".into()));
        }
        match self {
            GroupAction::Rotation | GroupAction::LeftMultiplication { .. } => g.mat().try_mul(x),
            GroupAction::Adjoint { .. } => {
                let inv = g.inverse()?;
                Ok(&(g.mat() * x) * inv.mat())
            }
        }
    }

    /// Acts with a raw matrix assumed to lie in the group.
    pub(crate) fn act_raw(&self, g: &Matrix, x: &Matrix) -> Result<Matrix> {
        match self {
            GroupAction::Rotation | GroupAction::LeftMultiplication { .. } => g.try_mul(x),
            GroupAction::Adjoint { group, .. } => {
                let inv = match group {
                    Group::So => g.transpose(),
                    _ => g.inverse()?,
                };
                Ok(&(g * x) * &inv)
            }
        }
    }

    /// Infinitesimal generator `ξ_M(x)`.
    pub fn generator(&self, xi: &AlgebraElement, x: &Matrix) -> Result<Matrix> {
        self.check_state(x)?;
        if xi.mat().rows() != self.matrix_size() {
            return Err(Error::Domain("algebra element of the wrong size".into()));
        }
        if xi.algebra() != self.algebra() && !self.algebra().contains(xi.mat()) {
            return Err(Error::Domain(format!(
                "{:?} element for an action of {:?}",
                xi.algebra(),
                self.group()
            )));
        }
        self.generator_raw(xi.mat(), x)
    }

    pub(crate) fn generator_raw(&self, xi: &Matrix, x: &Matrix) -> Result<Matrix> {
        match self {
            GroupAction::Rotation | GroupAction::LeftMultiplication { .. } => xi.try_mul(x),
            GroupAction::Adjoint { .. } => commutator(xi, x),
        }
    }

    /// Random group element `exp(ξ)`, `ξ` with uniform coefficients on an
    /// orthonormal algebra basis. Compact groups get coefficients in
    /// `[−π, π]`, the others in `[−½, ½]`.
    pub fn random_element(&self, rng: &mut SeededRng) -> GroupElement {
        let n = self.matrix_size();
        let span = match self.group() {
            Group::So => std::f64::consts::PI,
            _ => 0.5,
        };
        let mut xi = Matrix::zeros(n, n);
        for e in self.algebra().basis(n) {
            xi.axpy(rng.gen_range(-span..=span), &e);
        }
        let xi = AlgebraElement::new(xi, self.algebra()).expect("basis combination");
        exp_algebra(&xi).expect("exponential of a bounded algebra element")
    }
}

/// A leaf function `I: M → ℝᵏ` with an optional closed-form Jacobian.
#[derive(Clone)]
pub struct LeafFunction {
    dim: usize,
    value: LeafMap,
    jacobian: Option<StateMap>,
}

impl fmt::Debug for LeafFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LeafFunction")
            .field("dim", &self.dim)
            .field("closed_form_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl LeafFunction {
    pub fn new(dim: usize, value: impl Fn(&Matrix) -> Vec<f64> + Send + Sync + 'static) -> Self {
        LeafFunction {
            dim,
            value: Arc::new(value),
            jacobian: None,
        }
    }

    /// Registers a closed-form Jacobian, returning a `k × m` matrix over the
    /// row-major flattened state.
    pub fn with_jacobian(
        mut self,
        jacobian: impl Fn(&Matrix) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        self.jacobian = Some(Arc::new(jacobian));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, x: &Matrix) -> Vec<f64> {
        (self.value)(x)
    }

    pub fn has_closed_form_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    /// `dI(x)` as a `k × m` matrix. Without a registered closed form, centred
    /// differences with step `1e−6·(1+|xᵢ|)` per coordinate.
    pub fn jacobian(&self, x: &Matrix) -> Matrix {
        if let Some(j) = &self.jacobian {
            return j(x);
        }
        let m = x.len();
        let mut jac = Matrix::zeros(self.dim, m);
        let mut xp = x.clone();
        for i in 0..m {
            let xi = x.as_slice()[i];
            let h = 1e-6 * (1.0 + xi.abs());
            xp.as_mut_slice()[i] = xi + h;
            let fp = self.value(&xp);
            xp.as_mut_slice()[i] = xi - h;
            let fm = self.value(&xp);
            xp.as_mut_slice()[i] = xi;
            for r in 0..self.dim {
                jac[(r, i)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        jac
    }

    /// `dI(x)·v` for a tangent vector `v` of the state's shape.
    pub fn derivative(&self, x: &Matrix, v: &Matrix) -> Vec<f64> {
        let j = self.jacobian(x);
        let col = Matrix::column(v.as_slice());
        (&j * &col).into_vec()
    }
}

/// Foliate vector field in split form.
#[derive(Clone)]
pub struct FoliateSystem {
    name: String,
    action: GroupAction,
    tangent_gen: StateMap,
    invariant_field: StateMap,
    leaf: LeafFunction,
    reduced: ReducedMap,
}

impl fmt::Debug for FoliateSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FoliateSystem")
            .field("name", &self.name)
            .field("action", &self.action)
            .field("leaf", &self.leaf)
            .finish()
    }
}

impl FoliateSystem {
    pub fn new(
        name: impl Into<String>,
        action: GroupAction,
        tangent_gen: impl Fn(&Matrix) -> Matrix + Send + Sync + 'static,
        invariant_field: impl Fn(&Matrix) -> Matrix + Send + Sync + 'static,
        leaf: LeafFunction,
        reduced: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        FoliateSystem {
            name: name.into(),
            action,
            tangent_gen: Arc::new(tangent_gen),
            invariant_field: Arc::new(invariant_field),
            leaf,
            reduced: Arc::new(reduced),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn action(&self) -> GroupAction {
        self.action
    }

    pub fn state_shape(&self) -> (usize, usize) {
        self.action.state_shape()
    }

    pub fn leaf(&self) -> &LeafFunction {
        &self.leaf
    }

    /// `a(x)`, projected onto the action's algebra.
    pub fn tangent_generator(&self, x: &Matrix) -> Matrix {
        (self.tangent_gen)(x)
    }

    pub fn invariant_field(&self, x: &Matrix) -> Matrix {
        (self.invariant_field)(x)
    }

    pub fn reduced_rhs(&self, i: &[f64]) -> Vec<f64> {
        (self.reduced)(i)
    }

    pub fn leaf_value(&self, x: &Matrix) -> Vec<f64> {
        self.leaf.value(x)
    }

    /// `X(x) = a(x)_M(x) + f(x)`.
    pub fn eval(&self, x: &Matrix) -> Result<Matrix> {
        eval_field(self, x)
    }

    /// The same field as an unsplit system.
    pub fn to_plain(&self) -> PlainSystem {
        let sys = self.clone();
        PlainSystem {
            name: self.name.clone(),
            shape: self.state_shape(),
            rhs: Arc::new(move |x: &Matrix| {
                eval_field(&sys, x).unwrap_or_else(|_| Matrix::zeros(x.rows(), x.cols()).map(|_| f64::NAN))
            }),
            leaf: Some(self.leaf.clone()),
            reduced: Some(self.reduced.clone()),
        }
    }

    /// Co-leaf sampler drawing random group elements.
    pub fn orbit_sampler(&self) -> CoLeafMap {
        orbit_sampler(self.action)
    }
}

/// Vector field without a split.
#[derive(Clone)]
pub struct PlainSystem {
    name: String,
    shape: (usize, usize),
    rhs: StateMap,
    leaf: Option<LeafFunction>,
    reduced: Option<ReducedMap>,
}

impl fmt::Debug for PlainSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlainSystem")
            .field("name", &self.name)
            .field("shape", &self.shape)
            .field("leaf", &self.leaf)
            .finish()
    }
}

impl PlainSystem {
    pub fn new(
        name: impl Into<String>,
        shape: (usize, usize),
        rhs: impl Fn(&Matrix) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        PlainSystem {
            name: name.into(),
            shape,
            rhs: Arc::new(rhs),
            leaf: None,
            reduced: None,
        }
    }

    pub fn with_leaf(
        mut self,
        leaf: LeafFunction,
        reduced: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.leaf = Some(leaf);
        self.reduced = Some(Arc::new(reduced));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn leaf(&self) -> Option<&LeafFunction> {
        self.leaf.as_ref()
    }

    pub fn reduced(&self) -> Option<&ReducedMap> {
        self.reduced.as_ref()
    }

    pub fn rhs(&self, x: &Matrix) -> Matrix {
        (self.rhs)(x)
    }

    pub fn rhs_map(&self) -> StateMap {
        self.rhs.clone()
    }
}

/// `ξ_M(x)` for the action: `ξx` for linear actions on vectors/matrices,
/// `[ξ, x]` for conjugation.
pub fn generator_field(action: &GroupAction, xi: &AlgebraElement, x: &Matrix) -> Result<Matrix> {
    action.generator(xi, x)
}

/// `generator_field(action, a(x), x) + f(x)`.
pub fn eval_field(sys: &FoliateSystem, x: &Matrix) -> Result<Matrix> {
    let a = sys.tangent_generator(x);
    let tangent = sys.action.generator_raw(&a, x)?;
    let inv = sys.invariant_field(x);
    let out = tangent.try_add(&inv)?;
    if !out.is_finite() {
        return Err(Error::Divergence(format!("field of {}", sys.name)));
    }
    Ok(out)
}

/// Splits `X(x)` into the part in span `𝔤_M(x)` and the Frobenius-orthogonal
/// remainder.
///
/// The span is orthonormalised by modified Gram–Schmidt over the generator
/// fields of an algebra basis; directions with norm below `1e−10` relative to
/// the largest generator are discarded, so a point with `𝔤_M(x) = {0}` gets a
/// zero tangential part.
pub fn decompose_orthogonal(
    rhs: &dyn Fn(&Matrix) -> Matrix,
    action: &GroupAction,
    x: &Matrix,
) -> Result<(Matrix, Matrix)> {
    let field = rhs(x);
    if field.shape() != x.shape() {
        return Err(Error::Dimension("field and state differ in shape".into()));
    }
    let n = action.matrix_size();
    let gens: Vec<Matrix> = action
        .algebra()
        .basis(n)
        .iter()
        .map(|e| action.generator_raw(e, x))
        .collect::<Result<_>>()?;
    let scale = gens.iter().map(Matrix::norm_fro).fold(0.0, f64::max);
    let mut ortho: Vec<Matrix> = Vec::new();
    if scale > 0.0 {
        for g in gens {
            let mut v = g;
            for _ in 0..2 {
                for q in &ortho {
                    let c = v.dot(q);
                    v.axpy(-c, q);
                }
            }
            let nv = v.norm_fro();
            if nv > 1e-10 * scale {
                ortho.push(v.scale(1.0 / nv));
            }
        }
    }
    let mut par = Matrix::zeros(x.rows(), x.cols());
    for q in &ortho {
        par.axpy(field.dot(q), q);
    }
    let perp = &field - &par;
    Ok((par, perp))
}

/// Co-leaf sampler acting with random group elements.
pub fn orbit_sampler(action: GroupAction) -> CoLeafMap {
    Arc::new(move |x: &Matrix, rng: &mut SeededRng| {
        let g = action.random_element(rng);
        action.act_raw(g.mat(), x).expect("state matches action")
    })
}

/// Uniform random state with entries in `[−range, range]`.
pub fn random_state(shape: (usize, usize), range: f64, rng: &mut SeededRng) -> Matrix {
    let data = (0..shape.0 * shape.1)
        .map(|_| rng.gen_range(-range..=range))
        .collect();
    Matrix::from_vec(shape.0, shape.1, data).expect("finite samples")
}

/// Numerical foliateness evidence: the largest disagreement of `dI·X`
/// between pairs of points on a common leaf.
///
/// Pairs are `(x₁, co_leaf(x₁))` with `x₁` drawn by `sample`. A small value
/// is evidence, not proof.
pub fn check_foliate_numeric(
    rhs: &dyn Fn(&Matrix) -> Matrix,
    leaf: &LeafFunction,
    sample: &dyn Fn(&mut SeededRng) -> Matrix,
    co_leaf: &CoLeafMap,
    samples: usize,
    seed: u64,
) -> f64 {
    let mut rng = SeededRng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x1 = sample(&mut rng);
        let x2 = co_leaf(&x1, &mut rng);
        let d1 = leaf.derivative(&x1, &rhs(&x1));
        let d2 = leaf.derivative(&x2, &rhs(&x2));
        for (a, b) in d1.iter().zip(&d2) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

/// Largest `‖f(λ(g,x)) − λ(g, f(x))‖_max` over random samples.
pub fn equivariance_residual(sys: &FoliateSystem, samples: usize, seed: u64) -> f64 {
    let mut rng = SeededRng::seed_from_u64(seed);
    let action = sys.action();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = random_state(sys.state_shape(), 1.5, &mut rng);
        let g = action.random_element(&mut rng);
        let lhs = sys.invariant_field(&action.act_raw(g.mat(), &x).unwrap());
        let rhs = action.act_raw(g.mat(), &sys.invariant_field(&x)).unwrap();
        worst = worst.max((&lhs - &rhs).norm_max());
    }
    worst
}

/// Largest `|dI(x)·X(x) − h(I(x))|` over random samples.
pub fn reduced_residual(sys: &FoliateSystem, samples: usize, seed: u64) -> f64 {
    let mut rng = SeededRng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = random_state(sys.state_shape(), 1.5, &mut rng);
        let field = eval_field(sys, &x).unwrap();
        let lhs = sys.leaf.derivative(&x, &field);
        let rhs = sys.reduced_rhs(&sys.leaf_value(&x));
        for (a, b) in lhs.iter().zip(&rhs) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

impl FoliateSystem {
    /// [`check_foliate_numeric`] over uniform samples in `[−2, 2]` with
    /// orbit pairs.
    pub fn foliate_residual(&self, samples: usize, seed: u64) -> f64 {
        let shape = self.state_shape();
        let sys = self.clone();
        check_foliate_numeric(
            &move |x: &Matrix| eval_field(&sys, x).expect("field"),
            &self.leaf,
            &move |rng: &mut SeededRng| random_state(shape, 2.0, rng),
            &self.orbit_sampler(),
            samples,
            seed,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::rotation_generator;

    fn eq1() -> FoliateSystem {
        FoliateSystem::new(
            "eq1",
            GroupAction::Rotation,
            |x: &Matrix| rotation_generator().scale(-x[(0, 0)]),
            |x: &Matrix| {
                let r2 = x.dot(x);
                x.scale(1.0 - r2)
            },
            LeafFunction::new(1, |x: &Matrix| vec![x.dot(x)])
                .with_jacobian(|x: &Matrix| Matrix::from_rows(&[[2.0 * x[(0, 0)], 2.0 * x[(1, 0)]]])),
            |i: &[f64]| vec![2.0 * i[0] * (1.0 - i[0])],
        )
    }

    fn eq1_direct(x: &Matrix) -> Matrix {
        let (a, b) = (x[(0, 0)], x[(1, 0)]);
        let s = 1.0 - a * a - b * b;
        Matrix::column(&[a * b + a * s, -a * a + b * s])
    }

    #[test]
    fn rotation_generator_field() {
        let xi = AlgebraElement::new(rotation_generator(), Algebra::So).unwrap();
        let v = generator_field(&GroupAction::Rotation, &xi, &Matrix::column(&[2.0, 0.0])).unwrap();
        assert_eq!(v, Matrix::column(&[0.0, 2.0]));
        let zero = AlgebraElement::zero(2, Algebra::So);
        let v = generator_field(&GroupAction::Rotation, &zero, &Matrix::column(&[2.0, 0.0])).unwrap();
        assert_eq!(v, Matrix::zeros(2, 1));
    }

    #[test]
    fn adjoint_generator_is_commutator() {
        let action = GroupAction::Adjoint { n: 2, group: Group::So };
        let xi = AlgebraElement::new(rotation_generator(), Algebra::So).unwrap();
        let v = generator_field(&action, &xi, &Matrix::diag(&[1.0, -1.0])).unwrap();
        assert_eq!(v, Matrix::from_rows(&[[0.0, 2.0], [2.0, 0.0]]));
    }

    #[test]
    fn generator_rejects_shape_mismatch() {
        let xi = AlgebraElement::new(rotation_generator(), Algebra::So).unwrap();
        assert!(generator_field(&GroupAction::Rotation, &xi, &Matrix::zeros(3, 1)).is_err());
        let gl = AlgebraElement::new(Matrix::identity(2), Algebra::Gl).unwrap();
        assert!(generator_field(&GroupAction::Rotation, &gl, &Matrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn eq1_split_matches_direct_evaluation() {
        let sys = eq1();
        let x = Matrix::column(&[2.0, 0.0]);
        assert_eq!(sys.eval(&x).unwrap(), Matrix::column(&[-6.0, -4.0]));
        let mut rng = SeededRng::seed_from_u64(3);
        for _ in 0..50 {
            let x = random_state((2, 1), 2.0, &mut rng);
            assert!((&sys.eval(&x).unwrap() - &eq1_direct(&x)).norm_max() < 1e-14);
        }
    }

    #[test]
    fn decomposition_of_eq1() {
        let sys = eq1();
        let f = |x: &Matrix| sys.eval(x).unwrap();
        let (par, perp) =
            decompose_orthogonal(&f, &GroupAction::Rotation, &Matrix::column(&[2.0, 0.0])).unwrap();
        assert!((&par - &Matrix::column(&[0.0, -4.0])).norm_max() < 1e-14);
        assert!((&perp - &Matrix::column(&[-6.0, 0.0])).norm_max() < 1e-14);

        let (par, perp) =
            decompose_orthogonal(&f, &GroupAction::Rotation, &Matrix::zeros(2, 1)).unwrap();
        assert_eq!(par, Matrix::zeros(2, 1));
        assert_eq!(perp, f(&Matrix::zeros(2, 1)));
    }

    #[test]
    fn tangent_field_has_no_perpendicular_part() {
        let f = |x: &Matrix| &rotation_generator() * x;
        let (_, perp) =
            decompose_orthogonal(&f, &GroupAction::Rotation, &Matrix::column(&[0.3, -1.2])).unwrap();
        assert!(perp.norm_max() < 1e-15);
    }

    #[test]
    fn foliate_check_on_eq1_and_perturbation() {
        let sys = eq1();
        assert!(sys.foliate_residual(100, 0) <= 1e-10);

        let leaf = sys.leaf().clone();
        let sampler = |rng: &mut SeededRng| random_state((2, 1), 2.0, rng);
        let perturbed = |x: &Matrix| &eq1_direct(x) + &Matrix::column(&[0.1, 0.0]);
        let res = check_foliate_numeric(&perturbed, &leaf, &sampler, &sys.orbit_sampler(), 100, 0);
        assert!(res >= 1e-3, "perturbed residual {res}");

        let zero = |x: &Matrix| Matrix::zeros(x.rows(), x.cols());
        assert_eq!(
            check_foliate_numeric(&zero, &leaf, &sampler, &sys.orbit_sampler(), 100, 0),
            0.0
        );
    }

    #[test]
    fn finite_difference_jacobian_matches_closed_form() {
        let closed = eq1().leaf().clone();
        let fd = LeafFunction::new(1, |x: &Matrix| vec![x.dot(x)]);
        let x = Matrix::column(&[0.7, -1.3]);
        assert!((&closed.jacobian(&x) - &fd.jacobian(&x)).norm_max() < 1e-8);
    }

    #[test]
    fn action_identity_and_composition() {
        let actions = [
            GroupAction::Rotation,
            GroupAction::LeftMultiplication { n: 3, p: 2, group: Group::So },
            GroupAction::LeftMultiplication { n: 3, p: 3, group: Group::Sl },
            GroupAction::Adjoint { n: 3, group: Group::So },
            GroupAction::Adjoint { n: 3, group: Group::Sl },
        ];
        let mut rng = SeededRng::seed_from_u64(11);
        for action in actions {
            let n = action.matrix_size();
            for _ in 0..20 {
                let x = random_state(action.state_shape(), 1.0, &mut rng);
                let id = GroupElement::identity(n, action.group());
                assert!((&action.evaluate(&id, &x).unwrap() - &x).norm_max() <= 1e-14);
                let g1 = action.random_element(&mut rng);
                let g2 = action.random_element(&mut rng);
                let lhs = action
                    .evaluate(&g1, &action.evaluate(&g2, &x).unwrap())
                    .unwrap();
                let rhs = action.evaluate(&g1.compose(&g2), &x).unwrap();
                assert!((&lhs - &rhs).norm_max() <= 1e-12, "{action:?}");
            }
        }
    }

    #[test]
    fn eq1_invariant_field_is_equivariant() {
        assert!(equivariance_residual(&eq1(), 100, 5) <= 1e-12);
        assert!(reduced_residual(&eq1(), 100, 5) <= 1e-10);
    }
}
