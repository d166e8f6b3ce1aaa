//! Weighted graphs `(X, b, μ)` and the formal difference Laplacian.
//!
//! Raw data goes through [`GraphBuilder`], which keeps directed entries as
//! given so that [`GraphBuilder::validate`] can point at the exact pair or
//! vertex that breaks an axiom. A validated [`WeightedGraph`] is immutable.

mod io;

pub use io::{load_graph, parse_graph_json, parse_graph_text, write_graph_text, GraphDocument};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};

/// Collects vertices and (directed) weight entries before validation.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    name: String,
    labels: Vec<String>,
    mu: Vec<f64>,
    index: HashMap<String, usize>,
    weights: BTreeMap<(usize, usize), f64>,
    duplicate_vertex: Option<String>,
}

impl GraphBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn vertex(&mut self, label: impl Into<String>, mu: f64) -> usize {
        let label = label.into();
        if let Some(&i) = self.index.get(&label) {
            self.duplicate_vertex.get_or_insert(label);
            return i;
        }
        let i = self.labels.len();
        self.index.insert(label.clone(), i);
        self.labels.push(label);
        self.mu.push(mu);
        i
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Sets the single directed entry b(x, y).
    pub fn weight(&mut self, x: usize, y: usize, b: f64) -> &mut Self {
        self.weights.insert((x, y), b);
        self
    }

    /// Sets b(x, y) = b(y, x) = b.
    pub fn edge(&mut self, x: usize, y: usize, b: f64) -> &mut Self {
        self.weight(x, y, b).weight(y, x, b)
    }

    pub(crate) fn has_weight(&self, x: usize, y: usize) -> bool {
        self.weights.contains_key(&(x, y))
    }

    pub fn validate(self) -> Result<WeightedGraph> {
        if let Some(label) = self.duplicate_vertex {
            return Err(Error::DuplicateVertex(label));
        }
        for (label, &m) in self.labels.iter().zip(&self.mu) {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::NonpositiveMeasure(label.clone(), m));
            }
        }
        let n = self.labels.len();
        let mut adjacency = vec![Vec::new(); n];
        for (&(x, y), &b) in &self.weights {
            let (lx, ly) = (&self.labels[x], &self.labels[y]);
            if x == y {
                if b != 0.0 {
                    return Err(Error::SelfLoop(lx.clone(), b));
                }
                continue;
            }
            if !(b >= 0.0 && b.is_finite()) {
                return Err(Error::NegativeWeight(lx.clone(), ly.clone(), b));
            }
            let back = self.weights.get(&(y, x)).copied().unwrap_or(0.0);
            if back != b {
                return Err(Error::AsymmetricWeights(lx.clone(), ly.clone(), b, back));
            }
            if b > 0.0 {
                adjacency[x].push((y, b));
            }
        }
        let degree = adjacency
            .iter()
            .zip(&self.mu)
            .map(|(adj, m)| adj.iter().map(|(_, b)| b).sum::<f64>() / m)
            .collect();
        Ok(WeightedGraph {
            name: self.name,
            labels: self.labels,
            mu: self.mu,
            adjacency,
            degree,
        })
    }
}

/// A validated finite weighted graph. Vertices are identified by index.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    name: String,
    labels: Vec<String>,
    mu: Vec<f64>,
    /// Sorted by neighbour index; only positive weights.
    adjacency: Vec<Vec<(usize, f64)>>,
    degree: Vec<f64>,
}

impl WeightedGraph {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adjacency[x]
    }

    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.adjacency[x]
            .binary_search_by_key(&y, |&(v, _)| v)
            .map(|i| self.adjacency[x][i].1)
            .unwrap_or(0.0)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    fn check(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(x.to_string()))
        }
    }

    /// Deg(x) = (1/μ(x)) Σ_y b(x,y), the total jump rate out of `x`.
    pub fn weighted_degree(&self, x: usize) -> Result<f64> {
        self.check(x)?;
        Ok(self.degree[x])
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degree
    }

    pub fn max_degree(&self) -> f64 {
        self.degree.iter().copied().fold(0.0, f64::max)
    }

    /// Δ_{b,μ} f(x) = −(1/μ(x)) Σ_y b(x,y)(f(x) − f(y)). Nonpositive operator.
    pub fn laplacian_apply(&self, f: &VertexFunction, x: usize) -> Result<f64> {
        self.check(x)?;
        f.check(self)?;
        let fx = f[x];
        let s: f64 = self.adjacency[x].iter().map(|&(y, b)| b * (fx - f[y])).sum();
        Ok(-s / self.mu[x])
    }

    /// Connected components as sorted vertex lists, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &(y, _) in &self.adjacency[v] {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Dense generator H = −Δ_{b,μ}: H[x][x] = Deg(x), H[x][y] = −b(x,y)/μ(x).
    pub fn generator(&self) -> Matrix {
        let mut h = Matrix::zeros(self.len());
        for x in 0..self.len() {
            h[(x, x)] = self.degree[x];
            for &(y, b) in &self.adjacency[x] {
                h[(x, y)] = -b / self.mu[x];
            }
        }
        h
    }

    /// D^{1/2} H D^{−1/2} with D = diag(μ): a genuinely symmetric matrix
    /// isospectral to H.
    pub fn symmetric_generator(&self) -> Matrix {
        let mut s = Matrix::zeros(self.len());
        for x in 0..self.len() {
            s[(x, x)] = self.degree[x];
            for &(y, b) in &self.adjacency[x] {
                s[(x, y)] = -b / (self.mu[x] * self.mu[y]).sqrt();
            }
        }
        s
    }

    /// Stable content hash of (μ, b); labels and name do not participate.
    pub fn content_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.len().hash(&mut h);
        for (m, adj) in self.mu.iter().zip(&self.adjacency) {
            m.to_bits().hash(&mut h);
            for &(y, b) in adj {
                y.hash(&mut h);
                b.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }

    /// Subgraph induced by `keep` (in the given order), keeping μ and b.
    pub fn induced(&self, keep: &[usize]) -> WeightedGraph {
        let mut builder = GraphBuilder::new(format!("{}[induced]", self.name));
        let mut map = HashMap::new();
        for &v in keep {
            map.insert(v, builder.vertex(self.labels[v].clone(), self.mu[v]));
        }
        for &v in keep {
            for &(y, b) in &self.adjacency[v] {
                if let Some(&j) = map.get(&y) {
                    builder.weight(map[&v], j, b);
                }
            }
        }
        builder.validate().expect("induced subgraph of a valid graph is valid")
    }
}

/// Real function on the vertex set.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexFunction(pub Vec<f64>);

impl VertexFunction {
    pub fn constant(graph: &WeightedGraph, c: f64) -> Self {
        Self(vec![c; graph.len()])
    }

    pub fn indicator(graph: &WeightedGraph, x: usize) -> Self {
        let mut v = vec![0.0; graph.len()];
        v[x] = 1.0;
        Self(v)
    }

    fn check(&self, graph: &WeightedGraph) -> Result<()> {
        if self.0.len() == graph.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: graph.len(),
                got: self.0.len(),
            })
        }
    }
}

impl std::ops::Index<usize> for VertexFunction {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Graph given vertex by vertex, possibly infinite, used to build Dirichlet
/// truncations along an exhaustion.
pub trait LocallyFiniteGraph {
    type Vertex: Clone + Eq + Hash + std::fmt::Debug;

    fn measure(&self, v: &Self::Vertex) -> f64;

    /// Neighbours with positive weight. The list is the summability witness:
    /// it must be finite.
    fn neighbors_of(&self, v: &Self::Vertex) -> Vec<(Self::Vertex, f64)>;
}

impl LocallyFiniteGraph for WeightedGraph {
    type Vertex = usize;

    fn measure(&self, v: &usize) -> f64 {
        self.mu[*v]
    }

    fn neighbors_of(&self, v: &usize) -> Vec<(usize, f64)> {
        self.adjacency[*v].clone()
    }
}

/// The integer lattice Z with unit weights and counting measure.
#[derive(Clone, Copy, Debug, Default)]
pub struct IntegerLine;

impl LocallyFiniteGraph for IntegerLine {
    type Vertex = i64;

    fn measure(&self, _: &i64) -> f64 {
        1.0
    }

    fn neighbors_of(&self, v: &i64) -> Vec<(i64, f64)> {
        vec![(v - 1, 1.0), (v + 1, 1.0)]
    }
}

/// Small named graphs used throughout tests and examples.
pub mod families {
    use super::{GraphBuilder, WeightedGraph};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labelled(name: &str, mu: &[f64]) -> GraphBuilder {
        let mut g = GraphBuilder::new(name);
        for (i, &m) in mu.iter().enumerate() {
            g.vertex(format!("{}", i + 1), m);
        }
        g
    }

    pub fn single_vertex(mu: f64) -> WeightedGraph {
        labelled("single", &[mu]).validate().unwrap()
    }

    pub fn two_vertex(b: f64, mu: [f64; 2]) -> WeightedGraph {
        let mut g = labelled("two-vertex", &mu);
        g.edge(0, 1, b);
        g.validate().unwrap()
    }

    pub fn path(n: usize) -> WeightedGraph {
        let mut g = labelled(&format!("P_{n}"), &vec![1.0; n]);
        for i in 1..n {
            g.edge(i - 1, i, 1.0);
        }
        g.validate().unwrap()
    }

    pub fn complete(n: usize) -> WeightedGraph {
        let mut g = labelled(&format!("K_{n}"), &vec![1.0; n]);
        for i in 0..n {
            for j in (i + 1)..n {
                g.edge(i, j, 1.0);
            }
        }
        g.validate().unwrap()
    }

    pub fn star(weights: &[f64], center_mu: f64) -> WeightedGraph {
        let mut mu = vec![center_mu];
        mu.extend(std::iter::repeat_n(1.0, weights.len()));
        let mut g = labelled("star", &mu);
        for (i, &w) in weights.iter().enumerate() {
            g.edge(0, i + 1, w);
        }
        g.validate().unwrap()
    }

    /// Random connected graph: a random spanning tree plus extra edges with
    /// probability `p`; weights uniform in `b_range`, measures in `mu_range`.
    pub fn random_connected(
        n: usize,
        p: f64,
        b_range: (f64, f64),
        mu_range: (f64, f64),
        seed: u64,
    ) -> WeightedGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu: Vec<f64> = (0..n).map(|_| rng.gen_range(mu_range.0..=mu_range.1)).collect();
        let mut g = labelled(&format!("random-{n}"), &mu);
        for i in 1..n {
            let j = rng.gen_range(0..i);
            let b = rng.gen_range(b_range.0..=b_range.1);
            g.edge(i, j, b);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if !g.has_weight(i, j) && rng.gen_bool(p) {
                    let b = rng.gen_range(b_range.0..=b_range.1);
                    g.edge(i, j, b);
                }
            }
        }
        g.validate().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_symmetric_graph_is_valid_and_connected() {
        let g = two_vertex(1.0, [1.0, 1.0]);
        assert!(g.is_connected());
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn asymmetric_weights_rejected() {
        let mut b = GraphBuilder::new("bad");
        let x = b.vertex("1", 1.0);
        let y = b.vertex("2", 1.0);
        b.weight(x, y, 1.0).weight(y, x, 0.0);
        assert!(matches!(b.validate(), Err(Error::AsymmetricWeights(a, c, _, _)) if a == "1" && c == "2"));
    }

    #[test]
    fn self_loop_rejected() {
        let mut b = GraphBuilder::new("bad");
        let x = b.vertex("1", 1.0);
        b.weight(x, x, 0.5);
        assert!(matches!(b.validate(), Err(Error::SelfLoop(v, w)) if v == "1" && w == 0.5));
    }

    #[test]
    fn negative_weight_and_measure_rejected() {
        let mut b = GraphBuilder::new("bad");
        let x = b.vertex("1", 1.0);
        let y = b.vertex("2", 1.0);
        b.edge(x, y, -1.0);
        assert!(matches!(b.validate(), Err(Error::NegativeWeight(..))));

        let mut b = GraphBuilder::new("bad");
        b.vertex("1", 0.0);
        assert!(matches!(b.validate(), Err(Error::NonpositiveMeasure(v, _)) if v == "1"));
    }

    #[test]
    fn laplacian_two_vertex() {
        let g = two_vertex(1.0, [1.0, 1.0]);
        let f = VertexFunction(vec![1.0, 0.0]);
        assert_eq!(g.laplacian_apply(&f, 0).unwrap(), -1.0);
        assert!(matches!(g.laplacian_apply(&f, 7), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn laplacian_star_center() {
        let w = [0.5, 2.0, 1.5];
        let g = star(&w, 2.0);
        let f = VertexFunction::indicator(&g, 0);
        // −(1/μ(x)) Σ w_i (1 − 0)
        assert_eq!(g.laplacian_apply(&f, 0).unwrap(), -(0.5 + 2.0 + 1.5) / 2.0);
    }

    #[test]
    fn weighted_degree_cases() {
        assert_eq!(single_vertex(1.0).weighted_degree(0).unwrap(), 0.0);
        assert_eq!(two_vertex(1.0, [1.0, 1.0]).weighted_degree(0).unwrap(), 1.0);
        assert_eq!(two_vertex(1.0, [2.0, 1.0]).weighted_degree(0).unwrap(), 0.5);
    }

    #[test]
    fn components() {
        assert_eq!(path(3).connected_components().len(), 1);
        let mut b = GraphBuilder::new("two edges");
        for l in ["a", "b", "c", "d"] {
            b.vertex(l, 1.0);
        }
        b.edge(0, 1, 1.0).edge(2, 3, 1.0);
        assert_eq!(b.validate().unwrap().connected_components(), vec![vec![0, 1], vec![2, 3]]);
        let mut b = GraphBuilder::new("empty");
        for l in ["a", "b", "c"] {
            b.vertex(l, 1.0);
        }
        assert_eq!(b.validate().unwrap().connected_components().len(), 3);
    }

    #[test]
    fn random_connected_is_connected() {
        for seed in 0..5 {
            assert!(random_connected(20, 0.15, (0.1, 1.0), (0.5, 2.0), seed).is_connected());
        }
    }

    fn random_graph_and_fn() -> impl Strategy<Value = (WeightedGraph, Vec<f64>, Vec<f64>)> {
        (2usize..9, any::<u64>()).prop_flat_map(|(n, seed)| {
            let g = random_connected(n, 0.3, (0.1, 2.0), (0.3, 3.0), seed);
            (
                Just(g),
                prop::collection::vec(-5.0f64..5.0, n),
                prop::collection::vec(-5.0f64..5.0, n),
            )
        })
    }

    proptest! {
        #[test]
        #[allow(clippy::needless_range_loop)]
        fn laplacian_invariants((g, f, h) in random_graph_and_fn()) {
            let n = g.len();
            let ff = VertexFunction(f.clone());
            let hh = VertexFunction(h.clone());
            let sum = VertexFunction(f.iter().zip(&h).map(|(a, b)| 2.0 * a - b).collect());
            let c = VertexFunction::constant(&g, 3.7);
            let mut conservation = 0.0;
            let mut form = 0.0;
            for x in 0..n {
                let lf = g.laplacian_apply(&ff, x).unwrap();
                let lh = g.laplacian_apply(&hh, x).unwrap();
                let ls = g.laplacian_apply(&sum, x).unwrap();
                prop_assert!((ls - (2.0 * lf - lh)).abs() < 1e-10);
                prop_assert!(g.laplacian_apply(&c, x).unwrap().abs() < 1e-12);
                conservation += g.mu()[x] * lf;
                form += -f[x] * lf * g.mu()[x];
            }
            prop_assert!(conservation.abs() < 1e-9);
            // ⟨f, Hf⟩_μ = ½ Σ b (f(x) − f(y))² ≥ 0
            let mut dirichlet = 0.0;
            for x in 0..n {
                for &(y, b) in g.neighbors(x) {
                    dirichlet += 0.5 * b * (f[x] - f[y]).powi(2);
                }
            }
            prop_assert!((form - dirichlet).abs() < 1e-9 * dirichlet.max(1.0));
            prop_assert!(form >= -1e-12);
            let h = g.generator();
            for x in 0..n {
                for y in 0..n {
                    let (a, b) = (g.mu()[x] * h[(x, y)], g.mu()[y] * h[(y, x)]);
                    prop_assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }
}
