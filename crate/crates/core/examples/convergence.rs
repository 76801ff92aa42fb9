//! Self-convergence orders of the classical and Lie-group methods.

use foliate::cli::build_stepper;
use foliate::diagnostics::convergence_order;
use foliate::systems::{builtin_system, Params};
use foliate::Matrix;

fn main() -> foliate::Result<()> {
    let taus = [0.1, 0.05, 0.025, 0.0125];
    let x0 = Matrix::column(&[0.5, 0.5]);
    for system in ["eq1", "fig1-bottom"] {
        let sys = builtin_system(system, &Params::new())?;
        println!("{system}:");
        for method in ["euler", "midpoint", "rk4", "lie-euler", "rkmk4", "projection", "discrete-gradient"] {
            let stepper = build_stepper(&sys, method, None)?;
            let est = convergence_order(stepper.as_ref(), &x0, 1.0, &taus)?;
            println!("  {method:>17}  slope {:.3}  errors {:?}", est.slope, est.errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>());
        }
    }
    Ok(())
}
