//! Compare tr e^{−tH(w)} with the diagonal bound Σ p(t,x,x) e^{−t w(x)} μ(x).
//! Equality holds for constant potentials.
//!
//! ```bash
//! cargo run --release --example golden_thompson
//! ```

use heatlab::graph::families;
use heatlab::schrodinger::{golden_thompson_check, Potential};

fn main() -> heatlab::Result<()> {
    let g = families::random_connected(12, 0.3, (0.2, 1.0), (0.5, 2.0), 7);
    let bumpy = Potential::new((0..g.len()).map(|x| (x as f64 * 0.7).sin() * 2.0).collect())?;
    let flat = Potential::constant(g.len(), 0.8);

    println!("{:>6} {:>14} {:>14} {:>12}", "t", "trace", "bound", "gap");
    for t in [0.01, 0.1, 1.0, 10.0] {
        let gt = golden_thompson_check(&g, &bumpy, t)?;
        println!("{t:>6} {:>14.8} {:>14.8} {:>12.3e}", gt.lhs, gt.rhs, gt.gap());
        assert!(gt.gap() >= -1e-12 * gt.rhs);
    }
    let gt = golden_thompson_check(&g, &flat, 1.0)?;
    println!("constant potential: gap {:.2e}", gt.gap());
    Ok(())
}
