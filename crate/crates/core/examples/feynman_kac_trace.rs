//! Monte Carlo estimate of tr e^{−tH(w)} from loop paths, compared with the
//! exact trace. Same seed, same digits, whatever the thread count.
//!
//! ```bash
//! cargo run --release --example feynman_kac_trace
//! ```

use heatlab::graph::families;
use heatlab::sampler::feynman_kac_trace_mc;
use heatlab::schrodinger::{trace_semigroup, Potential};

fn main() -> heatlab::Result<()> {
    let g = families::complete(5);
    let w = Potential::new(vec![0.0, 0.5, 1.0, 1.5, 2.0])?;
    let t = 1.0;
    let exact = trace_semigroup(&g, &w, t)?;
    for n in [1_000, 10_000, 100_000] {
        let est = feynman_kac_trace_mc(&g, &w, t, n, 2024)?;
        println!(
            "n = {n:>6}  estimate {:.6} ± {:.6}  exact {exact:.6}  z = {:+.2}",
            est.mean,
            est.std_error,
            est.z_score(exact)
        );
    }
    let a = feynman_kac_trace_mc(&g, &w, t, 20_000, 1)?;
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| feynman_kac_trace_mc(&g, &w, t, 20_000, 1))?;
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    println!("single-thread rerun matches bit for bit");
    Ok(())
}
