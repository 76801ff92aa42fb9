//! Lie–Euler against explicit Euler on `ṙ = r(1 − r²)` with a θ-dependent
//! rotation: 20 starting points on the radius-2 circle, four steps of 0.1.

use foliate::diagnostics::figure2_experiment;

fn main() -> foliate::Result<()> {
    let data = figure2_experiment(0.1, 4, 20, 2.0)?;
    println!("step  lie-euler spread  euler spread   lie-euler r");
    for n in 0..=4 {
        let r = data.lie_euler[0].leaf_values[n][0].sqrt();
        println!(
            "{n:>4}  {:>16.3e}  {:>12.3e}   {r:.12}",
            data.lie_euler_spread[n], data.euler_spread[n]
        );
    }
    println!("\nfinal points (x, y):");
    for (a, b) in data.lie_euler.iter().zip(&data.euler).take(5) {
        let (p, q) = (a.last(), b.last());
        println!(
            "  lie-euler ({:+.5}, {:+.5})   euler ({:+.5}, {:+.5})",
            p[(0, 0)], p[(1, 0)], q[(0, 0)], q[(1, 0)]
        );
    }
    Ok(())
}
