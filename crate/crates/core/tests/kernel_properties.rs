use proptest::prelude::*;

use foliate::matgroup::{commutator, dexp, dexpinv, expm, mat_exp, Group};
use foliate::Matrix;

fn square(n: usize, scale: f64) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0..1.0f64, n * n)
        .prop_map(move |v| Matrix::from_vec(n, n, v).unwrap().scale(scale))
}

fn taylor(x: &Matrix, terms: usize) -> Matrix {
    let mut term = Matrix::identity(x.rows());
    let mut sum = term.clone();
    for k in 1..terms {
        term = (&term * x).scale(1.0 / k as f64);
        sum += &term;
    }
    sum
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_of_negative_is_inverse(x in square(4, 1.5)) {
        let p = &expm(&x).unwrap() * &expm(&-&x).unwrap();
        prop_assert!((&p - &Matrix::identity(4)).norm_max() <= 1e-12);
    }

    #[test]
    fn jacobi_identity(a in square(3, 1.0), b in square(3, 1.0), c in square(3, 1.0)) {
        let t1 = commutator(&a, &commutator(&b, &c).unwrap()).unwrap();
        let t2 = commutator(&b, &commutator(&c, &a).unwrap()).unwrap();
        let t3 = commutator(&c, &commutator(&a, &b).unwrap()).unwrap();
        prop_assert!((&(&t1 + &t2) + &t3).norm_max() <= 1e-13);
    }

    #[test]
    fn char_poly_is_similarity_invariant(a in square(3, 1.0), s in square(3, 0.3)) {
        let p = &Matrix::identity(3) + &s;
        let b = &(&p * &a) * &p.inverse().unwrap();
        let ca = a.char_poly().unwrap();
        let cb = b.char_poly().unwrap();
        for (u, v) in ca.iter().zip(&cb) {
            prop_assert!((u - v).abs() <= 1e-10 * (1.0 + u.abs()));
        }
    }

    #[test]
    fn exp_matches_long_taylor_series(x in square(3, 0.55)) {
        prop_assert!((&expm(&x).unwrap() - &taylor(&x, 31)).norm_max() <= 1e-13);
    }

    #[test]
    fn skew_exponentials_are_rotations(m in square(4, 3.0)) {
        let s = &m - &m.transpose();
        let g = mat_exp(&s).unwrap();
        prop_assert_eq!(g.group(), Group::So);
        prop_assert!(Group::So.contains(g.mat()));
    }

    #[test]
    fn dexpinv_inverts_dexp(x in square(3, 0.08), y in square(3, 1.0)) {
        let z = dexp(&x, &y, 12).unwrap();
        let back = dexpinv(&x, &z, 6).unwrap();
        prop_assert!((&back - &y).norm_max() <= 1e-7);
    }

    #[test]
    fn commuting_arguments_add(d1 in prop::collection::vec(-1.0..1.0f64, 3), d2 in prop::collection::vec(-1.0..1.0f64, 3)) {
        let a = Matrix::diag(&d1);
        let b = Matrix::diag(&d2);
        let lhs = expm(&(&a + &b)).unwrap();
        let rhs = &expm(&a).unwrap() * &expm(&b).unwrap();
        prop_assert!((&lhs - &rhs).norm_max() <= 1e-13);
    }
}

#[test]
fn large_arguments_use_squaring() {
    let x = Matrix::from_rows(&[[0.0, -20.0], [20.0, 0.0]]);
    let e = expm(&x).unwrap();
    let want = Matrix::from_rows(&[[20f64.cos(), -20f64.sin()], [20f64.sin(), 20f64.cos()]]);
    assert!((&e - &want).norm_max() <= 1e-12);
}
