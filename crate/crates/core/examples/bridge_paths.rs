//! Sample jump paths conditioned on their endpoint and estimate the chance
//! that a short loop never leaves a neighbourhood of its start.
//!
//! ```bash
//! cargo run --release --example bridge_paths
//! ```

use heatlab::graph::families;
use heatlab::sampler::{no_jump_lower_bound, pnfb_probability, stream_rng, BridgeSampler};

fn main() -> heatlab::Result<()> {
    let g = families::path(5);
    let x = g.index_of("3")?;
    let y = g.index_of("5")?;

    let bridges = BridgeSampler::new(&g, y, 1.0)?;
    let from = bridges.from_start(x)?;
    let mut rng = stream_rng(3, 0, 0);
    println!("p(1, 3, 5) = {:.6}, at most {} jumps", bridges.kernel(x), bridges.jump_cap());
    for _ in 0..3 {
        let p = from.sample(&mut rng);
        let hops: Vec<String> = p.jumps.iter().map(|(s, v)| format!("{}@{s:.3}", g.label(*v))).collect();
        println!("  3 -> {}", hops.join(" -> "));
        assert_eq!(p.end(), y);
    }

    let region = vec![g.index_of("2")?, x, g.index_of("4")?];
    println!("\n{:>6} {:>10} {:>10} {:>10}", "t", "stay", "se", "no-jump");
    for t in [1.0, 0.5, 0.1, 0.01] {
        let est = pnfb_probability(&g, x, &region, t, 20_000, 11)?;
        println!("{t:>6} {:>10.6} {:>10.2e} {:>10.6}", est.mean, est.std_error, no_jump_lower_bound(&g, x, t)?);
    }
    Ok(())
}
