//! Scaled Schrödinger trace on a finite graph as t → 0, with the
//! convergence report written as CSV.
//!
//! ```bash
//! cargo run --release --example graph_limit
//! ```

use heatlab::graph::families;
use heatlab::schrodinger::{default_grid, graph_semiclassical_scan, Potential, ScanTolerance};

fn main() -> heatlab::Result<()> {
    let g = families::path(5);
    let w = Potential::new(vec![0.0, -0.5, 1.0, 0.0, 2.0])?;
    let report = graph_semiclassical_scan(&g, &w, &default_grid(), ScanTolerance::default())?;
    print!("{}", report.to_csv());
    let v = &report.verdict;
    println!(
        "\ntarget {:.10}  final relative error {:.2e}  converged {}  order {:?}",
        report.target, v.relative_final_error, v.converged, v.empirical_order
    );
    Ok(())
}
