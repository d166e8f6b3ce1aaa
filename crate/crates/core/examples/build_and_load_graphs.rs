//! Build a weighted graph in code, round-trip it through both file formats
//! and inspect its generator.
//!
//! ```bash
//! cargo run --example build_and_load_graphs
//! ```

use heatlab::graph::{parse_graph_json, parse_graph_text, write_graph_text, GraphBuilder, GraphDocument};

fn main() -> heatlab::Result<()> {
    let mut b = GraphBuilder::new("triangle-with-tail");
    let a = b.vertex("a", 1.0);
    let c = b.vertex("b", 2.0);
    let d = b.vertex("c", 0.5);
    let e = b.vertex("tail", 1.0);
    b.edge(a, c, 1.0).edge(c, d, 0.5).edge(d, a, 2.0).edge(d, e, 0.25);
    let g = b.validate()?;

    println!("{} vertices, {} edges, connected: {}", g.len(), g.edge_count(), g.is_connected());
    for x in 0..g.len() {
        println!("  Deg({}) = {:.4}", g.label(x), g.weighted_degree(x)?);
    }

    let text = write_graph_text(&g);
    println!("\ntext format:\n{text}");
    assert_eq!(parse_graph_text(&text)?, g);

    let json = serde_json::to_string_pretty(&GraphDocument::from_graph(&g))?;
    println!("JSON format:\n{json}");
    assert_eq!(parse_graph_json(&json)?, g);

    // Rows of the generator sum to zero.
    let h = g.generator();
    for x in 0..g.len() {
        let row: f64 = h.row(x).iter().sum();
        assert!(row.abs() < 1e-12);
    }
    Ok(())
}
