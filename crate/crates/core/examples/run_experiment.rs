//! Drive the experiment runner from code, as the CLI does.
//!
//! ```bash
//! cargo run --release --example run_experiment -- fixtures/acceptance/fk_k5.json
//! ```

use heatlab::experiment::{run_path, RunOptions};
use std::path::PathBuf;

fn main() -> heatlab::Result<()> {
    let config = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/acceptance/graph_limit_p5.json"));
    let out = std::env::temp_dir().join("heatlab-example");
    let outcome = run_path(
        &config,
        &RunOptions {
            out_dir: Some(out),
            seed: None,
        },
    )?;
    for c in &outcome.checks {
        println!("{:<28} {:>12.4e} <= {:<10.3e} {}", c.name, c.value, c.limit, if c.passed { "ok" } else { "FAIL" });
    }
    println!("{} -> {}", outcome.name, outcome.csv_path.display());
    std::process::exit(outcome.exit_code());
}
