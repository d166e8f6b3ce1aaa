//! Heat kernel on a random graph: semigroup identity, symmetry, mass, and
//! the binary dump round trip.
//!
//! ```bash
//! cargo run --release --example heat_kernel_axioms
//! ```

use heatlab::graph::families;
use heatlab::heat_kernel::{heat_semigroup, on_diagonal_scan, read_binary_kernel, verify_axioms};
use heatlab::schrodinger::geometric_grid;

fn main() -> heatlab::Result<()> {
    let g = families::random_connected(30, 0.1, (0.1, 1.0), (0.5, 2.0), 42);
    let (s, t) = (0.3, 0.9);
    let report = verify_axioms(&heat_semigroup(&g, s)?, &heat_semigroup(&g, t)?, &heat_semigroup(&g, s + t)?)?;
    println!("{}", serde_json::to_string_pretty(&report)?);

    let table = heat_semigroup(&g, t)?;
    let (t_back, values) = read_binary_kernel(&table.to_binary())?;
    assert_eq!(t_back, t);
    assert_eq!(values.as_slice(), table.values.as_slice());

    println!("\np(t,x,x) μ(x) at vertex {} as t shrinks:", g.label(0));
    for (t, v) in on_diagonal_scan(&g, 0, &geometric_grid(1.0, 0.1, 6))? {
        println!("  t = {t:<8.0e} {v:.12}");
    }
    Ok(())
}
