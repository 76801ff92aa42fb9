//! Left multiplication by SO(3) on 3×2 matrices: RKMK4 keeps `AᵀA` identical
//! for two starting matrices that share it.

use foliate::diagnostics::integrate_builtin;
use foliate::integrators::{ButcherTableau, Rkmk};
use foliate::systems::{builtin_system, Params};

fn main() -> foliate::Result<()> {
    let sys = builtin_system("left-mult", &Params::new())?;
    let rkmk = Rkmk::new(sys.foliate().expect("left-mult is split").clone(), ButcherTableau::rk4());
    let pair = sys.leaf_bundle(sys.default_ic(), 2, 5);
    let a = integrate_builtin(&sys, &rkmk, &pair[0], 0.01, 100)?;
    let b = integrate_builtin(&sys, &rkmk, &pair[1], 0.01, 100)?;
    for n in [0, 50, 100] {
        let gap = a.leaf_values[n].iter().zip(&b.leaf_values[n]).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        println!("n = {n:>3}  upper(AᵀA) = {:?}  gap {gap:.2e}", a.leaf_values[n].iter().map(|v| format!("{v:.10}")).collect::<Vec<_>>());
    }
    println!("states differ by {:.3} throughout", (a.last() - b.last()).norm_max());
    Ok(())
}
