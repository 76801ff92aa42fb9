//! Built-in example systems.
//!
//! Each entry carries its foliate split (when it has one), leaf function,
//! reduced dynamics and a co-leaf sampler. Parameters are flat name → number
//! maps; unknown keys are rejected.
//!
//! | name          | state   | leaf function                 | parameters                   |
//! |---------------|---------|-------------------------------|------------------------------|
//! | `eq1`         | ℝ²      | `x² + y²`                     |                              |
//! | `eq2`         | ℝ²      | `x² + y²`                     |                              |
//! | `fig1-middle` | ℝ²      | `x² + y²`                     |                              |
//! | `fig1-bottom` | ℝ²      | `x² + y²`                     |                              |
//! | `lorenz`      | ℝ³      | `x² − 2σz`                    | `sigma`, `r`, `b` (= 2σ)     |
//! | `isospectral` | ℝⁿˣⁿ    | `tr L, …, tr Lⁿ`              | `n`, `alpha`, `beta`         |
//! | `left-mult`   | ℝⁿˣᵖ    | upper triangle of `AᵀA`/`det` | `n`, `p`, `group`, `alpha`, `beta` |
//! | `skew-product`| ℝ²      | `x`                           | `a`, `b`, `c`                |

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::foliation::{
    check_foliate_numeric, eval_field, orbit_sampler, random_state, CoLeafMap, FoliateSystem,
    GroupAction, LeafFunction, PlainSystem,
};
use crate::integrators::{
    Composition, ExactLinear, GradientForm, ImplicitMidpoint, SolveConfig, Splitting, Stepper,
};
use crate::matgroup::{project_algebra, rotation_generator, Algebra, Group, Matrix};
use crate::SeededRng;

/// Flat parameter record.
pub type Params = BTreeMap<String, f64>;

/// A catalogue entry: name, defaults and builder.
pub struct SystemCatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub default_params: &'static [(&'static str, f64)],
    pub builder: fn(&Params) -> Result<BuiltinSystem>,
}

impl fmt::Debug for SystemCatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemCatalogEntry")
            .field("name", &self.name)
            .field("default_params", &self.default_params)
            .finish()
    }
}

static CATALOGUE: &[SystemCatalogEntry] = &[
    SystemCatalogEntry {
        name: "eq1",
        description: "planar field with r' = r(1-r^2), theta' = -r cos(theta)",
        default_params: &[],
        builder: build_eq1,
    },
    SystemCatalogEntry {
        name: "eq2",
        description: "planar field x' = -y^2 + x, y' = xy + y; r' = r, theta' = r sin(theta)",
        default_params: &[],
        builder: build_eq2,
    },
    SystemCatalogEntry {
        name: "fig1-middle",
        description: "planar field with a first integral: r' = 0, theta' = -r cos(theta)",
        default_params: &[],
        builder: build_fig1_middle,
    },
    SystemCatalogEntry {
        name: "fig1-bottom",
        description: "rotation-symmetric field: r' = r(1-r^2), theta' = -(1 + r^2/5)",
        default_params: &[],
        builder: build_fig1_bottom,
    },
    SystemCatalogEntry {
        name: "lorenz",
        description: "Lorenz system with b = 2 sigma, leaves x^2 - 2 sigma z = const",
        default_params: &[("sigma", 10.0), ("r", 28.0)],
        builder: build_lorenz,
    },
    SystemCatalogEntry {
        name: "isospectral",
        description: "L' = [A(L), L] + L g(tr L, tr L^2) under SO(n) conjugation",
        default_params: &[("n", 3.0), ("alpha", 0.5), ("beta", 0.1)],
        builder: build_isospectral,
    },
    SystemCatalogEntry {
        name: "left-mult",
        description: "A' = g(A) A + f(A) under left multiplication (group 0 = SO(n), 1 = SL(n))",
        default_params: &[
            ("n", 3.0),
            ("p", 2.0),
            ("group", 0.0),
            ("alpha", 0.5),
            ("beta", 0.5),
        ],
        builder: build_left_mult,
    },
    SystemCatalogEntry {
        name: "skew-product",
        description: "skew product x' = a x, y' = b x y + c y, leaves x = const",
        default_params: &[("a", 1.0), ("b", 1.0), ("c", 0.0)],
        builder: build_skew_product,
    },
];

/// All registered systems.
pub fn catalogue() -> &'static [SystemCatalogEntry] {
    CATALOGUE
}

pub fn system_names() -> Vec<String> {
    CATALOGUE.iter().map(|e| e.name.to_string()).collect()
}

/// A resolved catalogue system with everything the integrators need.
#[derive(Clone)]
pub struct BuiltinSystem {
    name: String,
    params: Params,
    plain: PlainSystem,
    foliate: Option<FoliateSystem>,
    gradient: Option<GradientForm>,
    splitting: Option<Splitting>,
    co_leaf: CoLeafMap,
    default_ic: Matrix,
}

impl fmt::Debug for BuiltinSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BuiltinSystem")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("foliate", &self.foliate.is_some())
            .field("gradient", &self.gradient.is_some())
            .field("splitting", &self.splitting.is_some())
            .finish()
    }
}

impl BuiltinSystem {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Resolved parameters (defaults merged with overrides).
    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn plain(&self) -> &PlainSystem {
        &self.plain
    }

    pub fn foliate(&self) -> Option<&FoliateSystem> {
        self.foliate.as_ref()
    }

    pub fn gradient_form(&self) -> Option<&GradientForm> {
        self.gradient.as_ref()
    }

    pub fn splitting(&self) -> Option<&Splitting> {
        self.splitting.as_ref()
    }

    pub fn leaf(&self) -> &LeafFunction {
        self.plain.leaf().expect("catalogue systems register a leaf function")
    }

    pub fn leaf_value(&self, x: &Matrix) -> Vec<f64> {
        self.leaf().value(x)
    }

    pub fn reduced_rhs(&self, i: &[f64]) -> Vec<f64> {
        (self.plain.reduced().expect("catalogue systems register h"))(i)
    }

    pub fn state_shape(&self) -> (usize, usize) {
        self.plain.state_shape()
    }

    pub fn default_ic(&self) -> &Matrix {
        &self.default_ic
    }

    pub fn co_leaf(&self) -> &CoLeafMap {
        &self.co_leaf
    }

    /// `count` points on the leaf of `x0`: `x0` itself followed by
    /// co-leaf samples.
    pub fn leaf_bundle(&self, x0: &Matrix, count: usize, seed: u64) -> Vec<Matrix> {
        let mut rng = SeededRng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        if count > 0 {
            out.push(x0.clone());
        }
        while out.len() < count {
            out.push((self.co_leaf)(x0, &mut rng));
        }
        out
    }

    /// Numerical foliateness residual with uniform samples in `[−2, 2]`.
    pub fn foliate_residual(&self, samples: usize, seed: u64) -> f64 {
        let shape = self.state_shape();
        let plain = self.plain.clone();
        check_foliate_numeric(
            &move |x: &Matrix| plain.rhs(x),
            self.leaf(),
            &move |rng: &mut SeededRng| random_state(shape, 2.0, rng),
            &self.co_leaf,
            samples,
            seed,
        )
    }
}

/// Looks up `name` and builds it with `params` merged over the defaults.
pub fn builtin_system(name: &str, params: &Params) -> Result<BuiltinSystem> {
    let entry = CATALOGUE
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Catalogue {
            kind: "system",
            name: name.into(),
            valid: system_names(),
        })?;
    let mut merged: Params = entry
        .default_params
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect();
    for (k, v) in params {
        // `b` is accepted for lorenz so the b = 2σ constraint can be stated
        // explicitly.
        let allowed = merged.contains_key(k) || (name == "lorenz" && k == "b");
        if !allowed {
            return Err(Error::Domain(format!("unknown parameter `{k}` for {name}")));
        }
        if !v.is_finite() {
            return Err(Error::Domain(format!("parameter `{k}` is not finite")));
        }
        merged.insert(k.clone(), *v);
    }
    (entry.builder)(&merged)
}

fn param(p: &Params, key: &str) -> f64 {
    p[key]
}

fn int_param(p: &Params, key: &str, lo: usize, hi: usize) -> Result<usize> {
    let v = p[key];
    if v.fract() != 0.0 || v < lo as f64 || v > hi as f64 {
        return Err(Error::Domain(format!(
            "parameter `{key}` must be an integer in {lo}..={hi}, got {v}"
        )));
    }
    Ok(v as usize)
}

fn r2_leaf() -> LeafFunction {
    LeafFunction::new(1, |x: &Matrix| vec![x.dot(x)])
        .with_jacobian(|x: &Matrix| Matrix::from_rows(&[[2.0 * x[(0, 0)], 2.0 * x[(1, 0)]]]))
}

/// Planar field `ω(x)·Jx + ρ(r²)·x` under the rotation action, with leaf
/// function `r²` and reduced field `İ = 2Iρ(I)`.
pub fn planar_rotation_system(
    name: &str,
    omega: impl Fn(f64, f64) -> f64 + Send + Sync + Clone + 'static,
    rho: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static,
) -> (FoliateSystem, GradientForm) {
    let (om, rh) = (omega.clone(), rho.clone());
    let sys = FoliateSystem::new(
        name,
        GroupAction::Rotation,
        move |x: &Matrix| rotation_generator().scale(om(x[(0, 0)], x[(1, 0)])),
        move |x: &Matrix| x.scale(rh(x.dot(x))),
        r2_leaf(),
        {
            let rho = rho.clone();
            move |i: &[f64]| vec![2.0 * i[0] * rho(i[0])]
        },
    );
    // Discrete-gradient form with I = r²/2, ∇I = x, A = ω J.
    let form = GradientForm::new(
        name,
        move |x: &Matrix| rotation_generator().scale(omega(x[(0, 0)], x[(1, 0)])),
        |x: &Matrix| 0.5 * x.dot(x),
        |x: &Matrix| x.clone(),
        move |i: f64| 2.0 * i * rho(2.0 * i),
    );
    (sys, form)
}

fn from_planar(
    name: &str,
    params: &Params,
    sys: FoliateSystem,
    form: GradientForm,
    ic: [f64; 2],
) -> BuiltinSystem {
    BuiltinSystem {
        name: name.into(),
        params: params.clone(),
        plain: sys.to_plain(),
        co_leaf: sys.orbit_sampler(),
        foliate: Some(sys),
        gradient: Some(form),
        splitting: None,
        default_ic: Matrix::column(&ic),
    }
}

fn build_eq1(p: &Params) -> Result<BuiltinSystem> {
    let (sys, form) = planar_rotation_system("eq1", |x, _| -x, |r2| 1.0 - r2);
    Ok(from_planar("eq1", p, sys, form, [2.0, 0.0]))
}

fn build_eq2(p: &Params) -> Result<BuiltinSystem> {
    // Tangent part y·Jx = (−y², xy), radial part x: θ̇ = r sin θ, ṙ = r.
    let (sys, form) = planar_rotation_system("eq2", |_, y| y, |_| 1.0);
    Ok(from_planar("eq2", p, sys, form, [0.0, 1.0]))
}

fn build_fig1_middle(p: &Params) -> Result<BuiltinSystem> {
    let (sys, form) = planar_rotation_system("fig1-middle", |x, _| -x, |_| 0.0);
    Ok(from_planar("fig1-middle", p, sys, form, [1.0, 0.0]))
}

fn build_fig1_bottom(p: &Params) -> Result<BuiltinSystem> {
    let (sys, form) = planar_rotation_system(
        "fig1-bottom",
        |x, y| -(1.0 + (x * x + y * y) / 5.0),
        |r2| 1.0 - r2,
    );
    Ok(from_planar("fig1-bottom", p, sys, form, [1.5, 0.0]))
}

/// Lorenz tangent piece `X₁ = (σy, −xz − rx, xy)`.
pub fn lorenz_tangent_part(sigma: f64, r: f64) -> PlainSystem {
    PlainSystem::new("lorenz-x1", (3, 1), move |s: &Matrix| {
        let (x, y, z) = (s[(0, 0)], s[(1, 0)], s[(2, 0)]);
        Matrix::column(&[sigma * y, -x * z - r * x, x * y])
    })
}

/// Lorenz linear piece `X₂ = diag(−σ, −1, −2σ)`.
pub fn lorenz_linear_part(sigma: f64) -> Matrix {
    Matrix::diag(&[-sigma, -1.0, -2.0 * sigma])
}

fn build_lorenz(p: &Params) -> Result<BuiltinSystem> {
    let sigma = param(p, "sigma");
    let r = param(p, "r");
    if let Some(b) = p.get("b") {
        if (b - 2.0 * sigma).abs() > 1e-12 * (1.0 + sigma.abs()) {
            return Err(Error::Domain(format!(
                "lorenz is foliate only for b = 2 sigma = {}, got b = {b}",
                2.0 * sigma
            )));
        }
    }
    if sigma == 0.0 {
        return Err(Error::Domain("lorenz needs sigma != 0".into()));
    }
    let b = 2.0 * sigma;
    let leaf = LeafFunction::new(1, move |s: &Matrix| vec![s[(0, 0)].powi(2) - 2.0 * sigma * s[(2, 0)]])
        .with_jacobian(move |s: &Matrix| Matrix::from_rows(&[[2.0 * s[(0, 0)], 0.0, -2.0 * sigma]]));
    let plain = PlainSystem::new("lorenz", (3, 1), move |s: &Matrix| {
        let (x, y, z) = (s[(0, 0)], s[(1, 0)], s[(2, 0)]);
        Matrix::column(&[sigma * y - sigma * x, -y - x * z - r * x, x * y - b * z])
    })
    .with_leaf(leaf, move |i: &[f64]| vec![-2.0 * sigma * i[0]]);

    let x1: Arc<dyn Stepper> = Arc::new(
        ImplicitMidpoint::new(lorenz_tangent_part(sigma, r), SolveConfig::default()).marked_foliate(),
    );
    let x2: Arc<dyn Stepper> = Arc::new(ExactLinear::new(lorenz_linear_part(sigma))?.marked_foliate());
    let splitting = Splitting::new("split", vec![x1, x2], Composition::Sequential)?;

    // Same leaf: pick new (x, y), solve for z.
    let co_leaf: CoLeafMap = Arc::new(move |s: &Matrix, rng: &mut SeededRng| {
        let i = s[(0, 0)].powi(2) - 2.0 * sigma * s[(2, 0)];
        let x: f64 = rng.gen_range(-2.0..=2.0);
        let y: f64 = rng.gen_range(-2.0..=2.0);
        Matrix::column(&[x, y, (x * x - i) / (2.0 * sigma)])
    });

    Ok(BuiltinSystem {
        name: "lorenz".into(),
        params: p.clone(),
        plain,
        foliate: None,
        gradient: None,
        splitting: Some(splitting),
        co_leaf,
        default_ic: Matrix::column(&[1.0, 1.0, 1.0]),
    })
}

/// `L̇ = [A(L), L] + L·g(tr L, tr L²)` on `n × n` matrices under SO(n)
/// conjugation. `a_map` is projected onto so(n). Leaf function
/// `(tr L, …, tr Lⁿ)` with reduced field `İ_k = k·g(I₁, I₂)·I_k`.
pub fn isospectral(
    n: usize,
    a_map: impl Fn(&Matrix) -> Matrix + Send + Sync + 'static,
    g: impl Fn(f64, f64) -> f64 + Send + Sync + Clone + 'static,
) -> Result<FoliateSystem> {
    if !(2..=4).contains(&n) {
        return Err(Error::Domain(format!("isospectral needs 2 <= n <= 4, got {n}")));
    }
    let leaf = LeafFunction::new(n, move |l: &Matrix| {
        let mut p = l.clone();
        let mut out = vec![p.trace()];
        for _ in 1..n {
            p = &p * l;
            out.push(p.trace());
        }
        out
    })
    .with_jacobian(move |l: &Matrix| {
        // d tr(Lᵏ)/dL = k (Lᵏ⁻¹)ᵀ
        let mut jac = Matrix::zeros(n, n * n);
        let mut p = Matrix::identity(n);
        for k in 1..=n {
            let row = p.transpose().scale(k as f64);
            for (c, v) in row.as_slice().iter().enumerate() {
                jac[(k - 1, c)] = *v;
            }
            p = &p * l;
        }
        jac
    });
    let gf = g.clone();
    Ok(FoliateSystem::new(
        "isospectral",
        GroupAction::Adjoint { n, group: Group::So },
        move |l: &Matrix| project_algebra(&a_map(l), Algebra::So).expect("square").into_mat(),
        move |l: &Matrix| {
            let t1 = l.trace();
            let t2 = (l * l).trace();
            l.scale(gf(t1, t2))
        },
        leaf,
        move |i: &[f64]| {
            let gv = g(i[0], i[1]);
            i.iter().enumerate().map(|(k, v)| (k + 1) as f64 * gv * v).collect()
        },
    ))
}

fn build_isospectral(p: &Params) -> Result<BuiltinSystem> {
    let n = int_param(p, "n", 2, 4)?;
    let alpha = param(p, "alpha");
    let beta = param(p, "beta");
    let sys = isospectral(n, |l: &Matrix| l.skew_part(), move |_, t2| alpha - beta * t2 * t2)?;
    let mut ic = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            ic[(i, j)] = match (i as i64 - j as i64).signum() {
                0 => 1.0 - 0.5 * i as f64,
                1 => 0.3 / (1.0 + i as f64),
                _ => 0.2 * (j - i) as f64,
            };
        }
    }
    Ok(BuiltinSystem {
        name: "isospectral".into(),
        params: p.clone(),
        plain: sys.to_plain(),
        co_leaf: sys.orbit_sampler(),
        foliate: Some(sys),
        gradient: None,
        splitting: None,
        default_ic: ic,
    })
}

/// Superdiagonal shift used by the default tangent generator of `left-mult`.
fn shift(n: usize) -> Matrix {
    let mut s = Matrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        s[(i, i + 1)] = 1.0;
    }
    s
}

/// Left multiplication by SO(n) on `n × p` matrices:
/// `Ȧ = g(A)A + A·V(AᵀA)` with `g` projected onto so(n). Leaf function is the
/// upper triangle of `S = AᵀA` (row-major), reduced field `Ṡ = VᵀS + SV`.
pub fn left_mult_so(
    n: usize,
    p: usize,
    g_map: impl Fn(&Matrix) -> Matrix + Send + Sync + 'static,
    v_map: impl Fn(&Matrix) -> Matrix + Send + Sync + Clone + 'static,
) -> Result<FoliateSystem> {
    if n < 2 || p < 1 || p > n {
        return Err(Error::Domain(format!("left-mult needs 2 <= n and 1 <= p <= n, got n={n}, p={p}")));
    }
    let k = p * (p + 1) / 2;
    let leaf = LeafFunction::new(k, move |a: &Matrix| upper(&(&a.transpose() * a)))
        .with_jacobian(move |a: &Matrix| {
            // ∂S_ij/∂A_rc = δ_ci A_rj + δ_cj A_ri
            let mut jac = Matrix::zeros(k, n * p);
            let mut row = 0;
            for i in 0..p {
                for j in i..p {
                    for r in 0..n {
                        jac[(row, r * p + i)] += a[(r, j)];
                        jac[(row, r * p + j)] += a[(r, i)];
                    }
                    row += 1;
                }
            }
            jac
        });
    let vf = v_map.clone();
    Ok(FoliateSystem::new(
        "left-mult",
        GroupAction::LeftMultiplication { n, p, group: Group::So },
        move |a: &Matrix| project_algebra(&g_map(a), Algebra::So).expect("square").into_mat(),
        move |a: &Matrix| a * &vf(&(&a.transpose() * a)),
        leaf,
        move |i: &[f64]| {
            let s = from_upper(i, p);
            let v = v_map(&s);
            upper(&(&(&v.transpose() * &s) + &(&s * &v)))
        },
    ))
}

/// Left multiplication by SL(n) on `n × n` matrices:
/// `Ȧ = g(A)A + v(det A)·A` with `g` projected onto sl(n). Leaf function
/// `det A`, reduced field `ḋ = n·v(d)·d`.
pub fn left_mult_sl(
    n: usize,
    g_map: impl Fn(&Matrix) -> Matrix + Send + Sync + 'static,
    v: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static,
) -> Result<FoliateSystem> {
    if !(2..=4).contains(&n) {
        return Err(Error::Domain(format!("left-mult with SL(n) needs 2 <= n <= 4, got {n}")));
    }
    let leaf = LeafFunction::new(1, |a: &Matrix| vec![a.det().unwrap_or(f64::NAN)])
        .with_jacobian(move |a: &Matrix| {
            let c = cofactor(a);
            Matrix::from_vec(1, n * n, c.into_vec()).expect("finite cofactors")
        });
    let vf = v.clone();
    Ok(FoliateSystem::new(
        "left-mult",
        GroupAction::LeftMultiplication { n, p: n, group: Group::Sl },
        move |a: &Matrix| project_algebra(&g_map(a), Algebra::Sl).expect("square").into_mat(),
        move |a: &Matrix| a.scale(vf(a.det().unwrap_or(f64::NAN))),
        leaf,
        move |i: &[f64]| vec![n as f64 * v(i[0]) * i[0]],
    ))
}

/// Cofactor matrix (gradient of the determinant).
fn cofactor(a: &Matrix) -> Matrix {
    let n = a.rows();
    let mut c = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<f64> = (0..n)
                .filter(|&r| r != i)
                .flat_map(|r| (0..n).filter(move |&s| s != j).map(move |s| (r, s)))
                .map(|(r, s)| a[(r, s)])
                .collect();
            let m = if n == 1 {
                1.0
            } else {
                Matrix::from_vec(n - 1, n - 1, minor)
                    .and_then(|m| m.det())
                    .unwrap_or(f64::NAN)
            };
            c[(i, j)] = if (i + j) % 2 == 0 { m } else { -m };
        }
    }
    c
}

fn upper(s: &Matrix) -> Vec<f64> {
    let p = s.rows();
    let mut out = Vec::with_capacity(p * (p + 1) / 2);
    for i in 0..p {
        for j in i..p {
            out.push(s[(i, j)]);
        }
    }
    out
}

fn from_upper(v: &[f64], p: usize) -> Matrix {
    let mut s = Matrix::zeros(p, p);
    let mut k = 0;
    for i in 0..p {
        for j in i..p {
            s[(i, j)] = v[k];
            s[(j, i)] = v[k];
            k += 1;
        }
    }
    s
}

fn build_left_mult(p: &Params) -> Result<BuiltinSystem> {
    let n = int_param(p, "n", 2, 6)?;
    let cols = int_param(p, "p", 1, n)?;
    let group = int_param(p, "group", 0, 1)?;
    let alpha = param(p, "alpha");
    let beta = param(p, "beta");
    let shift_n = shift(n);
    let sys = if group == 0 {
        left_mult_so(
            n,
            cols,
            move |a: &Matrix| &(a * &a.transpose()) * &shift_n,
            move |s: &Matrix| {
                let mut v = s.scale(-beta);
                for i in 0..s.rows() {
                    v[(i, i)] += alpha;
                }
                v
            },
        )?
    } else {
        if cols != n {
            return Err(Error::Domain("left-mult with group=1 (SL) needs p = n".into()));
        }
        left_mult_sl(
            n,
            move |a: &Matrix| {
                let aat = a * &a.transpose();
                &aat * &shift_n.scale(1.0 / (1.0 + aat.trace()))
            },
            move |d| alpha - beta * d,
        )?
    };
    // Default IC: first `p` columns of a fixed rotation (so AᵀA = I); the SL
    // variant stretches the first column so det A ≠ 1.
    let rot = crate::matgroup::expm(&(&shift(n) - &shift(n).transpose()).scale(0.4))?;
    let mut ic = Matrix::zeros(n, cols);
    for r in 0..n {
        for c in 0..cols {
            ic[(r, c)] = rot[(r, c)] * if group == 1 && c == 0 { 1.2 } else { 1.0 };
        }
    }
    Ok(BuiltinSystem {
        name: "left-mult".into(),
        params: p.clone(),
        plain: sys.to_plain(),
        co_leaf: sys.orbit_sampler(),
        foliate: Some(sys),
        gradient: None,
        splitting: None,
        default_ic: ic,
    })
}

/// Skew product `ẋ = f(x)`, `ẏ = g(x, y)` on ℝ² with leaf function `x` and
/// reduced field `f`.
pub fn skew_product(
    f: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static,
    g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
) -> PlainSystem {
    let ff = f.clone();
    PlainSystem::new("skew-product", (2, 1), move |s: &Matrix| {
        let (x, y) = (s[(0, 0)], s[(1, 0)]);
        Matrix::column(&[ff(x), g(x, y)])
    })
    .with_leaf(
        LeafFunction::new(1, |s: &Matrix| vec![s[(0, 0)]])
            .with_jacobian(|_: &Matrix| Matrix::from_rows(&[[1.0, 0.0]])),
        move |i: &[f64]| vec![f(i[0])],
    )
}

fn build_skew_product(p: &Params) -> Result<BuiltinSystem> {
    let (a, b, c) = (param(p, "a"), param(p, "b"), param(p, "c"));
    let plain = skew_product(move |x| a * x, move |x, y| b * x * y + c * y);
    let co_leaf: CoLeafMap = Arc::new(|s: &Matrix, rng: &mut SeededRng| {
        Matrix::column(&[s[(0, 0)], rng.gen_range(-2.0..=2.0)])
    });
    Ok(BuiltinSystem {
        name: "skew-product".into(),
        params: p.clone(),
        plain,
        foliate: None,
        gradient: None,
        splitting: None,
        co_leaf,
        default_ic: Matrix::column(&[1.0, 0.5]),
    })
}

/// Polar velocity `(ṙ, θ̇)` of a planar field at `x`.
pub fn polar_velocity(rhs: &Matrix, x: &Matrix) -> (f64, f64) {
    let (px, py) = (x[(0, 0)], x[(1, 0)]);
    let (vx, vy) = (rhs[(0, 0)], rhs[(1, 0)]);
    let r = (px * px + py * py).sqrt();
    ((px * vx + py * vy) / r, (px * vy - py * vx) / (r * r))
}

/// Evaluates a catalogue system's unsplit field, going through the split
/// form when there is one.
pub fn eval_builtin(sys: &BuiltinSystem, x: &Matrix) -> Result<Matrix> {
    match sys.foliate() {
        Some(f) => eval_field(f, x),
        None => Ok(sys.plain().rhs(x)),
    }
}

/// Orbit co-leaf sampler for an action, re-exported for fixtures.
pub fn action_sampler(action: GroupAction) -> CoLeafMap {
    orbit_sampler(action)
}
