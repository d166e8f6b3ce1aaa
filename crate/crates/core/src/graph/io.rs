//! Graph files.
//!
//! Text form, one record per line, `#` starts a comment:
//!
//! ```text
//! graph two-vertex
//! v 1 1.0
//! v 2 1.0
//! e 1 2 1.0
//! ```
//!
//! Undirected edges are listed once. The JSON form carries the same data as
//! `{"name": .., "vertices": [{"id": .., "mu": ..}], "edges": [{"u": .., "v": .., "b": ..}]}`.

use super::{GraphBuilder, WeightedGraph};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Label {
    Text(String),
    Int(i64),
}

impl Label {
    fn into_string(self) -> String {
        match self {
            Label::Text(s) => s,
            Label::Int(i) => i.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct VertexRecord {
    id: Label,
    mu: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct EdgeRecord {
    u: Label,
    v: Label,
    b: f64,
}

/// Structured-object form of a graph file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphDocument {
    #[serde(default)]
    name: String,
    vertices: Vec<VertexRecord>,
    #[serde(default)]
    edges: Vec<EdgeRecord>,
}

impl GraphDocument {
    pub fn from_graph(g: &WeightedGraph) -> Self {
        let vertices = (0..g.len())
            .map(|x| VertexRecord {
                id: Label::Text(g.label(x).to_string()),
                mu: g.mu()[x],
            })
            .collect();
        let mut edges = Vec::new();
        for x in 0..g.len() {
            for &(y, b) in g.neighbors(x) {
                if x < y {
                    edges.push(EdgeRecord {
                        u: Label::Text(g.label(x).to_string()),
                        v: Label::Text(g.label(y).to_string()),
                        b,
                    });
                }
            }
        }
        Self {
            name: g.name().to_string(),
            vertices,
            edges,
        }
    }
}

fn add_edge(builder: &mut GraphBuilder, u: &str, v: &str, b: f64, line: usize) -> Result<()> {
    let lookup = |l: &str| {
        builder.index_of(l).ok_or_else(|| Error::Parse {
            line,
            msg: format!("edge references undeclared vertex {l}"),
        })
    };
    let (x, y) = (lookup(u)?, lookup(v)?);
    if builder.has_weight(x, y) || builder.has_weight(y, x) {
        return Err(Error::DuplicateEdge(u.to_string(), v.to_string()));
    }
    builder.edge(x, y, b);
    Ok(())
}

pub fn parse_graph_text(src: &str) -> Result<WeightedGraph> {
    let mut builder: Option<GraphBuilder> = None;
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let bad = |msg: &str| Error::Parse {
            line,
            msg: format!("{msg}: `{content}`"),
        };
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad("expected a number"));
        match fields[0] {
            "graph" => {
                if builder.is_some() {
                    return Err(bad("second graph header"));
                }
                builder = Some(GraphBuilder::new(fields[1..].join(" ")));
            }
            "v" | "e" if builder.is_none() => return Err(bad("record before `graph` header")),
            "v" => {
                if fields.len() != 3 {
                    return Err(bad("expected `v <id> <mu>`"));
                }
                builder.as_mut().unwrap().vertex(fields[1], num(fields[2])?);
            }
            "e" => {
                if fields.len() != 4 {
                    return Err(bad("expected `e <id> <id> <b>`"));
                }
                let b = num(fields[3])?;
                add_edge(builder.as_mut().unwrap(), fields[1], fields[2], b, line)?;
            }
            _ => return Err(bad("unknown record")),
        }
    }
    builder
        .ok_or(Error::Parse {
            line: 0,
            msg: "missing `graph` header".into(),
        })?
        .validate()
}

pub fn parse_graph_json(src: &str) -> Result<WeightedGraph> {
    let doc: GraphDocument = serde_json::from_str(src)?;
    let mut builder = GraphBuilder::new(doc.name);
    for v in doc.vertices {
        builder.vertex(v.id.into_string(), v.mu);
    }
    for (i, e) in doc.edges.into_iter().enumerate() {
        add_edge(&mut builder, &e.u.into_string(), &e.v.into_string(), e.b, i + 1)?;
    }
    builder.validate()
}

/// Loads either file form; JSON is recognised by a leading `{`.
pub fn load_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if src.trim_start().starts_with('{') {
        parse_graph_json(&src)
    } else {
        parse_graph_text(&src)
    }
}

pub fn write_graph_text(g: &WeightedGraph) -> String {
    let mut out = format!("graph {}\n", g.name());
    for x in 0..g.len() {
        writeln!(out, "v {} {}", g.label(x), g.mu()[x]).unwrap();
    }
    for x in 0..g.len() {
        for &(y, b) in g.neighbors(x) {
            if x < y {
                writeln!(out, "e {} {} {}", g.label(x), g.label(y), b).unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families;

    #[test]
    fn text_and_json_agree() {
        let text = "graph two\n# comment\nv 1 1.0\nv 2 2.0\ne 1 2 0.5\n";
        let json = r#"{"name":"two","vertices":[{"id":1,"mu":1.0},{"id":"2","mu":2.0}],
                       "edges":[{"u":1,"v":2,"b":0.5}]}"#;
        let a = parse_graph_text(text).unwrap();
        let b = parse_graph_json(json).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.weight(0, 1), 0.5);
        assert_eq!(a.weight(1, 0), 0.5);
    }

    #[test]
    fn text_round_trip() {
        let g = families::random_connected(8, 0.3, (0.1, 1.0), (0.5, 2.0), 3);
        assert_eq!(parse_graph_text(&write_graph_text(&g)).unwrap(), g);
        let doc = serde_json::to_string(&GraphDocument::from_graph(&g)).unwrap();
        assert_eq!(parse_graph_json(&doc).unwrap(), g);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_graph_text("v 1 1.0"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_graph_text("graph g\nv 1 x"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph_text("graph g\nv 1 1\ne 1 2 1"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_graph_text("graph g\nv 1 1\ne 1 1 0.5"), Err(Error::SelfLoop(..))));
        assert!(matches!(
            parse_graph_text("graph g\nv 1 1\nv 2 1\ne 1 2 1\ne 2 1 1"),
            Err(Error::DuplicateEdge(..))
        ));
        assert!(matches!(parse_graph_text("graph g\nv 1 -1"), Err(Error::NonpositiveMeasure(..))));
    }
}
