//! Projection method: advance the leaf value with the reduced field, take an
//! RK4 step, and project orthogonally onto the new leaf.

use foliate::integrators::{ButcherTableau, Projection, SolveConfig};
use foliate::systems::{builtin_system, Params};

fn main() -> foliate::Result<()> {
    let sys = builtin_system("eq1", &Params::new())?;
    let proj = Projection::with_tableau(sys.plain(), ButcherTableau::rk4(), SolveConfig::default())?;
    let mut x = sys.default_ic().clone();
    let mut i = sys.leaf_value(&x);
    let mut worst: f64 = 0.0;
    for n in 1..=1000 {
        (x, i) = proj.step_with_leaf(&x, &i, 0.01)?;
        worst = worst.max((sys.leaf_value(&x)[0] - i[0]).abs());
        if n % 200 == 0 {
            println!("n = {n:>4}  r² = {:.12}  x = ({:+.6}, {:+.6})", i[0], x[(0, 0)], x[(1, 0)]);
        }
    }
    println!("max |I(xₙ) − Iₙ| = {worst:.3e}");
    Ok(())
}
