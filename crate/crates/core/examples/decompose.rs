//! Splits a field into its component along the group orbit and the
//! orthogonal remainder, and checks foliateness numerically.

use foliate::foliation::{decompose_orthogonal, GroupAction};
use foliate::systems::{builtin_system, Params};
use foliate::Matrix;

fn main() -> foliate::Result<()> {
    let sys = builtin_system("eq1", &Params::new())?;
    let rhs = |x: &Matrix| sys.plain().rhs(x);
    for p in [[2.0, 0.0], [0.0, 1.5], [1.0, 1.0], [0.0, 0.0]] {
        let x = Matrix::column(&p);
        let (par, perp) = decompose_orthogonal(&rhs, &GroupAction::Rotation, &x)?;
        println!(
            "x = ({:+.1}, {:+.1})  along orbit ({:+.4}, {:+.4})  across ({:+.4}, {:+.4})",
            p[0], p[1], par[(0, 0)], par[(1, 0)], perp[(0, 0)], perp[(1, 0)]
        );
    }
    for name in foliate::systems::system_names() {
        let sys = builtin_system(&name, &Params::new())?;
        println!("{name:>12}: foliate residual {:.2e}", sys.foliate_residual(50, 0));
    }
    Ok(())
}
