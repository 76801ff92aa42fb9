//! The implicit midpoint rule is not foliate for `ẋ = y·Jx + x`: the τ³ term of
//! `r′²` depends on the angle through `(3 − y²)/2`.

use foliate::diagnostics::{midpoint_coefficient, midpoint_coefficient_series};
use foliate::Matrix;

fn main() -> foliate::Result<()> {
    let taus = [1e-2, 5e-3, 2.5e-3];
    for (x, y) in [(0.0, 1.0), (1.0, 0.0), (0.0, 3f64.sqrt()), (0.6, 0.8)] {
        let x0 = Matrix::column(&[x, y]);
        let series = midpoint_coefficient_series(&x0, &taus)?;
        let limit = midpoint_coefficient(&x0, &taus)?;
        println!(
            "x0 = ({x:.3}, {y:.3})  c(τ) = {:?}  extrapolated {limit:.5}  expected {:.5}",
            series.iter().map(|c| format!("{c:.5}")).collect::<Vec<_>>(),
            (3.0 - y * y) / 2.0
        );
    }
    Ok(())
}
