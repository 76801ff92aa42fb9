//! Dense matrix arithmetic and the matrix Lie group kernel.
//!
//! Everything here works on small dense row-major matrices (n ≤ 10 in practice).
//! States of the integrators are matrices as well: a point of ℝᵐ is an `m × 1`
//! column.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Membership tolerance for Lie algebra tags (relative, induced ∞-norm).
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Membership tolerance for group tags.
pub const GROUP_TOL: f64 = 1e-10;

/// Dense real matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|v| format!("{v:.6e}")).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting a wrong entry count or
    /// non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite matrix entry".into()));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            let row = row.as_ref();
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix {
            rows: r,
            cols: c,
            data,
        }
    }

    /// Column vector.
    pub fn column(values: &[f64]) -> Self {
        Matrix {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Same entries, new shape.
    pub fn reshape(&self, rows: usize, cols: usize) -> Result<Self> {
        if rows * cols != self.len() {
            return Err(Error::Dimension(format!(
                "cannot reshape {}x{} into {rows}x{cols}",
                self.rows, self.cols
            )));
        }
        Ok(Matrix {
            rows,
            cols,
            data: self.data.clone(),
        })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Matrix) {
        assert_eq!(self.shape(), other.shape(), "axpy shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius inner product.
    pub fn dot(&self, other: &Matrix) -> f64 {
        assert_eq!(self.len(), other.len(), "dot length mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Largest absolute entry.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Induced ∞-norm (max row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Induced 1-norm (max column sum).
    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix> {
        same_shape(self, other, "addition")?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix> {
        same_shape(self, other, "subtraction")?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    /// LU factorisation with partial pivoting.
    fn lu(&self) -> Result<Lu> {
        if !self.is_square() {
            return Err(Error::Dimension("LU of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = self.norm_max().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))
                .unwrap_or(k);
            if a[(p, k)].abs() <= 1e-300 * scale {
                return Ok(Lu {
                    a,
                    perm,
                    sign,
                    singular: true,
                });
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let l = a[(i, k)] / pivot;
                a[(i, k)] = l;
                for j in k + 1..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= l * v;
                }
            }
        }
        Ok(Lu {
            a,
            perm,
            sign,
            singular: false,
        })
    }

    pub fn det(&self) -> Result<f64> {
        let lu = self.lu()?;
        if lu.singular {
            return Ok(0.0);
        }
        Ok((0..self.rows).map(|i| lu.a[(i, i)]).product::<f64>() * lu.sign)
    }

    /// Solves `self · X = rhs`.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        if rhs.rows != self.rows {
            return Err(Error::Dimension(format!(
                "right-hand side has {} rows, system has {}",
                rhs.rows, self.rows
            )));
        }
        let lu = self.lu()?;
        if lu.singular {
            return Err(Error::Domain("singular matrix".into()));
        }
        let n = self.rows;
        let mut x = Matrix::zeros(n, rhs.cols);
        for c in 0..rhs.cols {
            let mut y: Vec<f64> = lu.perm.iter().map(|&p| rhs[(p, c)]).collect();
            for i in 0..n {
                for k in 0..i {
                    y[i] -= lu.a[(i, k)] * y[k];
                }
            }
            for i in (0..n).rev() {
                for k in i + 1..n {
                    y[i] -= lu.a[(i, k)] * y[k];
                }
                y[i] /= lu.a[(i, i)];
            }
            for i in 0..n {
                x[(i, c)] = y[i];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.solve(&Matrix::identity(self.rows))
    }

    /// Coefficients `[1, c₁, …, cₙ]` of `det(λI − self) = λⁿ + c₁λⁿ⁻¹ + … + cₙ`
    /// (Faddeev–LeVerrier).
    pub fn char_poly(&self) -> Result<Vec<f64>> {
        if !self.is_square() {
            return Err(Error::Dimension("characteristic polynomial of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut coeffs = vec![1.0];
        let mut m = Matrix::zeros(n, n);
        for k in 1..=n {
            let mut next = self * &m;
            for i in 0..n {
                next[(i, i)] += coeffs[k - 1];
            }
            m = next;
            let am = self * &m;
            coeffs.push(-am.trace() / k as f64);
        }
        Ok(coeffs)
    }

    /// `(self − selfᵀ)/2`.
    pub fn skew_part(&self) -> Matrix {
        (self - &self.transpose()).scale(0.5)
    }

    /// `(self + selfᵀ)/2`.
    pub fn sym_part(&self) -> Matrix {
        (self + &self.transpose()).scale(0.5)
    }
}

struct Lu {
    a: Matrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

fn same_shape(a: &Matrix, b: &Matrix, what: &str) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "{what} of {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(())
}

fn square(m: &Matrix, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "{what} needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    Ok(())
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator impls panic on shape mismatch; the `try_*` methods are the checked
// variants.
impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).expect("matrix add")
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).expect("matrix sub")
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix mul")
    }
}

impl Add for Matrix {
    type Output = Matrix;
    fn add(self, rhs: Matrix) -> Matrix {
        &self + &rhs
    }
}

impl Sub for Matrix {
    type Output = Matrix;
    fn sub(self, rhs: Matrix) -> Matrix {
        &self - &rhs
    }
}

impl Mul for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        &self * &rhs
    }
}

impl Mul<f64> for &Matrix {
    type Output = Matrix;
    fn mul(self, s: f64) -> Matrix {
        self.scale(s)
    }
}

impl Mul<f64> for Matrix {
    type Output = Matrix;
    fn mul(self, s: f64) -> Matrix {
        self.scale(s)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

impl Neg for Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

impl AddAssign<&Matrix> for Matrix {
    fn add_assign(&mut self, rhs: &Matrix) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&Matrix> for Matrix {
    fn sub_assign(&mut self, rhs: &Matrix) {
        self.axpy(-1.0, rhs);
    }
}

/// Matrix Lie algebras the kernel knows how to project onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algebra {
    Gl,
    So,
    Sl,
    Diag,
}

impl Algebra {
    /// Membership test with the default tolerance.
    pub fn contains(self, m: &Matrix) -> bool {
        self.contains_tol(m, ALGEBRA_TOL)
    }

    pub fn contains_tol(self, m: &Matrix, tol: f64) -> bool {
        if !m.is_square() || !m.is_finite() {
            return false;
        }
        let scale = 1.0 + m.norm_inf();
        match self {
            Algebra::Gl => true,
            Algebra::So => (m + &m.transpose()).norm_inf() <= tol * scale,
            Algebra::Sl => m.trace().abs() <= tol * scale,
            Algebra::Diag => (0..m.rows())
                .all(|i| (0..m.cols()).all(|j| i == j || m[(i, j)] == 0.0)),
        }
    }

    /// Orthonormal (Frobenius) basis of the algebra in dimension `n`.
    pub fn basis(self, n: usize) -> Vec<Matrix> {
        let unit = |i: usize, j: usize| {
            let mut e = Matrix::zeros(n, n);
            e[(i, j)] = 1.0;
            e
        };
        match self {
            Algebra::Gl => (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| unit(i, j))
                .collect(),
            Algebra::Diag => (0..n).map(|i| unit(i, i)).collect(),
            Algebra::So => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let mut out = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        let mut e = Matrix::zeros(n, n);
                        e[(i, j)] = -s;
                        e[(j, i)] = s;
                        out.push(e);
                    }
                }
                out
            }
            Algebra::Sl => {
                let mut out = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            out.push(unit(i, j));
                        }
                    }
                }
                // Gram–Schmidt on diag(e_k − e_{k+1}).
                let mut diags: Vec<Matrix> = Vec::new();
                for k in 0..n.saturating_sub(1) {
                    let mut d = Matrix::zeros(n, n);
                    d[(k, k)] = 1.0;
                    d[(k + 1, k + 1)] = -1.0;
                    for q in &diags {
                        let c = d.dot(q);
                        d.axpy(-c, q);
                    }
                    let nrm = d.norm_fro();
                    diags.push(d.scale(1.0 / nrm));
                }
                out.extend(diags);
                out
            }
        }
    }

    pub fn dim(self, n: usize) -> usize {
        match self {
            Algebra::Gl => n * n,
            Algebra::So => n * n.saturating_sub(1) / 2,
            Algebra::Sl => (n * n).saturating_sub(1),
            Algebra::Diag => n,
        }
    }
}

/// Matrix Lie groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Group {
    Gl,
    So,
    Sl,
}

impl Group {
    pub fn algebra(self) -> Algebra {
        match self {
            Group::Gl => Algebra::Gl,
            Group::So => Algebra::So,
            Group::Sl => Algebra::Sl,
        }
    }

    pub fn contains(self, m: &Matrix) -> bool {
        self.contains_tol(m, GROUP_TOL)
    }

    pub fn contains_tol(self, m: &Matrix, tol: f64) -> bool {
        if !m.is_square() || !m.is_finite() {
            return false;
        }
        match self {
            Group::Gl => m.det().map(|d| d.abs() > 0.0).unwrap_or(false),
            Group::So => {
                let n = m.rows();
                let r = &(&m.transpose() * m) - &Matrix::identity(n);
                r.norm_inf() <= tol && m.det().map(|d| d > 0.0).unwrap_or(false)
            }
            Group::Sl => m.det().map(|d| (d - 1.0).abs() <= tol).unwrap_or(false),
        }
    }
}

/// A square matrix tagged with the Lie algebra it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    mat: Matrix,
    algebra: Algebra,
}

impl AlgebraElement {
    /// Validates membership with the default tolerance.
    pub fn new(mat: Matrix, algebra: Algebra) -> Result<Self> {
        Self::with_tolerance(mat, algebra, ALGEBRA_TOL)
    }

    pub fn with_tolerance(mat: Matrix, algebra: Algebra, tol: f64) -> Result<Self> {
        square(&mat, "algebra element")?;
        if !algebra.contains_tol(&mat, tol) {
            return Err(Error::Domain(format!("matrix is not in {algebra:?}")));
        }
        Ok(AlgebraElement { mat, algebra })
    }

    pub fn zero(n: usize, algebra: Algebra) -> Self {
        AlgebraElement {
            mat: Matrix::zeros(n, n),
            algebra,
        }
    }

    pub fn mat(&self) -> &Matrix {
        &self.mat
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn into_mat(self) -> Matrix {
        self.mat
    }
}

/// An invertible square matrix tagged with its group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    mat: Matrix,
    group: Group,
}

impl GroupElement {
    pub fn new(mat: Matrix, group: Group) -> Result<Self> {
        Self::with_tolerance(mat, group, GROUP_TOL)
    }

    pub fn with_tolerance(mat: Matrix, group: Group, tol: f64) -> Result<Self> {
        square(&mat, "group element")?;
        if !group.contains_tol(&mat, tol) {
            return Err(Error::Domain(format!("matrix is not in {group:?}")));
        }
        Ok(GroupElement { mat, group })
    }

    pub fn identity(n: usize, group: Group) -> Self {
        GroupElement {
            mat: Matrix::identity(n),
            group,
        }
    }

    pub fn mat(&self) -> &Matrix {
        &self.mat
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn into_mat(self) -> Matrix {
        self.mat
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            mat: &self.mat * &other.mat,
            group: if self.group == other.group {
                self.group
            } else {
                Group::Gl
            },
        }
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        let mat = match self.group {
            Group::So => self.mat.transpose(),
            _ => self.mat.inverse()?,
        };
        Ok(GroupElement {
            mat,
            group: self.group,
        })
    }
}

// [8/8] Padé coefficients c_k = (16-k)! 8! / (16! k! (8-k)!).
const PADE_ORDER: usize = 8;

fn pade_coefficients() -> [f64; PADE_ORDER + 1] {
    let m = PADE_ORDER;
    let mut c = [0.0; PADE_ORDER + 1];
    c[0] = 1.0;
    for k in 1..=m {
        c[k] = c[k - 1] * (m + 1 - k) as f64 / (k * (2 * m + 1 - k)) as f64;
    }
    c
}

/// Raw matrix exponential by scaling and squaring with an [8/8] Padé
/// approximant; the scaled 1-norm is at most 1/2.
pub fn expm(x: &Matrix) -> Result<Matrix> {
    square(x, "matrix exponential")?;
    if !x.is_finite() {
        return Err(Error::Domain("non-finite entry in exponential argument".into()));
    }
    let n = x.rows();
    let norm = x.norm_1();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let a = x.scale(0.5f64.powi(squarings));
    let c = pade_coefficients();

    let mut even = Matrix::identity(n).scale(c[0]);
    let mut odd = Matrix::zeros(n, n);
    let mut power = Matrix::identity(n);
    for (k, ck) in c.iter().enumerate().skip(1) {
        power = &power * &a;
        if k % 2 == 0 {
            even.axpy(*ck, &power);
        } else {
            odd.axpy(*ck, &power);
        }
    }
    let num = &even + &odd;
    let den = &even - &odd;
    let mut r = den.solve(&num)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if !r.is_finite() {
        return Err(Error::Domain("matrix exponential overflowed".into()));
    }
    Ok(r)
}

/// Matrix exponential tagged with the smallest implemented group the result
/// verifiably belongs to: `SO(n)` for skew input, `SL(n)` for traceless input,
/// `GL(n)` otherwise.
pub fn mat_exp(x: &Matrix) -> Result<GroupElement> {
    let r = expm(x)?;
    let group = if Algebra::So.contains(x) && Group::So.contains(&r) {
        Group::So
    } else if Algebra::Sl.contains(x) && Group::Sl.contains(&r) {
        Group::Sl
    } else {
        Group::Gl
    };
    Ok(GroupElement { mat: r, group })
}

/// Exponential of an algebra element, landing in the corresponding group.
pub fn exp_algebra(xi: &AlgebraElement) -> Result<GroupElement> {
    let r = expm(&xi.mat)?;
    let group = match xi.algebra {
        Algebra::So => Group::So,
        Algebra::Sl => Group::Sl,
        Algebra::Gl | Algebra::Diag => Group::Gl,
    };
    GroupElement::new(r, group)
}

/// `AB − BA`.
pub fn commutator(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    square(a, "commutator")?;
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "commutator of {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(&(a * b) - &(b * a))
}

// Bernoulli numbers B_0..B_5 (B_1 = -1/2 convention).
const BERNOULLI: [f64; 6] = [1.0, -0.5, 1.0 / 6.0, 0.0, -1.0 / 30.0, 0.0];

/// Truncated inverse differential of the exponential,
/// `Σ_{k<order} B_k/k! ad_X^k(Y)`.
///
/// `order` is the classical order of the RKMK method that uses it, so the
/// highest commutator grade kept is `order − 1`.
pub fn dexpinv(x: &Matrix, y: &Matrix, order: usize) -> Result<Matrix> {
    if !(1..=6).contains(&order) {
        return Err(Error::Domain(format!("dexpinv order {order} not in 1..=6")));
    }
    square(x, "dexpinv")?;
    if x.shape() != y.shape() {
        return Err(Error::Dimension("dexpinv arguments differ in shape".into()));
    }
    let mut out = y.clone();
    let mut ad = y.clone();
    let mut factorial = 1.0;
    for (k, bk) in BERNOULLI.iter().enumerate().take(order).skip(1) {
        ad = commutator(x, &ad)?;
        factorial *= k as f64;
        if *bk != 0.0 {
            out.axpy(bk / factorial, &ad);
        }
    }
    Ok(out)
}

/// Differential of the exponential, `Σ_{k<terms} ad_X^k(Y)/(k+1)!`, so that
/// `d/dt exp(Ω) = dexp_Ω(Ω̇) exp(Ω)`.
pub fn dexp(x: &Matrix, y: &Matrix, terms: usize) -> Result<Matrix> {
    square(x, "dexp")?;
    if x.shape() != y.shape() {
        return Err(Error::Dimension("dexp arguments differ in shape".into()));
    }
    let mut out = y.clone();
    let mut ad = y.clone();
    let mut factorial = 1.0;
    for k in 1..terms {
        ad = commutator(x, &ad)?;
        factorial *= (k + 1) as f64;
        out.axpy(1.0 / factorial, &ad);
    }
    Ok(out)
}

/// Projects a square matrix onto a subalgebra of `gl(n)`.
pub fn project_algebra(m: &Matrix, algebra: Algebra) -> Result<AlgebraElement> {
    square(m, "algebra projection")?;
    let n = m.rows();
    let mat = match algebra {
        Algebra::Gl => m.clone(),
        Algebra::So => m.skew_part(),
        Algebra::Sl => {
            let mut r = m.clone();
            let t = m.trace() / n as f64;
            for i in 0..n {
                r[(i, i)] -= t;
            }
            r
        }
        Algebra::Diag => Matrix::diag(&(0..n).map(|i| m[(i, i)]).collect::<Vec<_>>()),
    };
    Ok(AlgebraElement { mat, algebra })
}

/// The so(2) generator `J = [[0, −1], [1, 0]]`.
pub fn rotation_generator() -> Matrix {
    Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]])
}
