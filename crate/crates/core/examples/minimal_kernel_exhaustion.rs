//! Killed kernels on growing regions increase to the heat kernel, both on a
//! finite graph and on the integer line.
//!
//! ```bash
//! cargo run --release --example minimal_kernel_exhaustion
//! ```

use heatlab::graph::{families, IntegerLine};
use heatlab::heat_kernel::{heat_semigroup, minimal_heat_kernel, Exhaustion};

fn main() -> heatlab::Result<()> {
    let g = families::path(12);
    let sets: Vec<Vec<usize>> = [2, 4, 6, 9, 12].iter().map(|&n| (0..n).collect()).collect();
    let seq = minimal_heat_kernel(&g, &Exhaustion::new(sets)?, 1.0, &0, &1)?;
    let full = heat_semigroup(&g, 1.0)?.get(0, 1);
    println!("path graph, p(1, 1, 2) = {full:.12}");
    for v in &seq.values {
        println!("  {v:.12}  (short by {:.2e})", full - v);
    }

    let balls = Exhaustion::balls(&[1, 2, 4, 8, 16, 32])?;
    let seq = minimal_heat_kernel(&IntegerLine, &balls, 1.0, &0, &0)?;
    println!("\ninteger line, killed p(1, 0, 0) on balls:");
    for v in &seq.values {
        println!("  {v:.12}");
    }
    println!("last increment {:.2e}", seq.last_gap);
    Ok(())
}
