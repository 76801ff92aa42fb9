//! Samples three planar foliate fields on [−2, 2]² and writes them, with flow
//! markers at t = 0, 0.5, 1, as JSON for external plotting.

use foliate::diagnostics::{figure1_fields, GridSpec};

fn main() -> foliate::Result<()> {
    let data = figure1_fields(&GridSpec::default())?;
    for d in &data {
        eprintln!(
            "{:>12}: {} samples, {} flow markers, tangency residual {:.1e}",
            d.system,
            d.samples.len(),
            d.dots.len(),
            d.consistency_residual
        );
    }
    println!("{}", serde_json::to_string(&data).expect("datasets serialise"));
    Ok(())
}
