//! Conjugation flows `L̇ = [A(L), L] + L·g(tr L, tr L²)`: Lie–Euler keeps the
//! traces of powers on the reduced orbit, and similar starting matrices stay
//! similar.

use foliate::diagnostics::integrate_builtin;
use foliate::integrators::LieEuler;
use foliate::systems::{builtin_system, Params};

fn main() -> foliate::Result<()> {
    let mut still = Params::new();
    still.insert("alpha".into(), 0.0);
    still.insert("beta".into(), 0.0);
    for (label, params) in [("pure conjugation", still), ("trace-scaled", Params::new())] {
        let sys = builtin_system("isospectral", &params)?;
        let lie = LieEuler::new(sys.foliate().expect("isospectral is split").clone());
        let pair = sys.leaf_bundle(sys.default_ic(), 2, 11);
        let a = integrate_builtin(&sys, &lie, &pair[0], 0.01, 1000)?;
        let b = integrate_builtin(&sys, &lie, &pair[1], 0.01, 1000)?;
        println!("{label}:");
        for n in [0, 250, 500, 1000] {
            println!(
                "  n = {n:>4}  tr L^k = {:?}  gap to similar start {:.2e}",
                a.leaf_values[n].iter().map(|v| format!("{v:.8}")).collect::<Vec<_>>(),
                a.leaf_values[n].iter().zip(&b.leaf_values[n]).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
            );
        }
    }
    Ok(())
}
