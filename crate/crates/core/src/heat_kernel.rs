//! Heat kernels on finite weighted graphs.
//!
//! The semigroup `e^{−tH}` with `H = −Δ_{b,μ}` is built by uniformization:
//! pick `Λ ≥ max Deg`, let `R = I − H/Λ` (entrywise nonnegative, rows summing
//! to one on the full graph and to at most one on Dirichlet truncations) and
//! sum the Poisson mixture `e^{−Λt} Σ (Λt)^n/n! R^n`. Every term is
//! nonnegative, so the result carries a sign certificate, and the dropped
//! Poisson tail bounds the error in the row-sum norm.
//!
//! The kernel is `p(t,x,y) = e^{−tH}[x,y] / μ(y)`, so that
//! `P_t f(x) = Σ_y p(t,x,y) f(y) μ(y)`.

use crate::error::{Error, Result};
use crate::graph::{LocallyFiniteGraph, WeightedGraph};
use crate::linalg::Matrix;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, RwLock};

/// Default cutoff for the dropped Poisson tail.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-14;

/// Magic bytes of the binary kernel dump.
pub const BINARY_MAGIC: [u8; 4] = *b"HKT1";

/// Truncated Poisson(`mean`) weights `w_0..=w_N` with a rigorous bound on
/// the omitted mass `Σ_{n>N} w_n`.
#[derive(Clone, Debug)]
pub struct PoissonWeights {
    pub weights: Vec<f64>,
    pub tail_bound: f64,
}

impl PoissonWeights {
    pub fn new(mean: f64, tolerance: f64) -> Self {
        assert!(mean >= 0.0 && mean.is_finite());
        if mean == 0.0 {
            return Self {
                weights: vec![1.0],
                tail_bound: 0.0,
            };
        }
        // Unnormalised weights anchored at the mode, recurring outwards.
        let mode = mean.floor() as usize;
        let mut weights = vec![0.0; mode + 1];
        weights[mode] = 1.0;
        for n in (1..=mode).rev() {
            weights[n - 1] = weights[n] * n as f64 / mean;
        }
        loop {
            let n = weights.len() - 1;
            let next = weights[n] * mean / (n as f64 + 1.0);
            // Terms after N are dominated by a geometric series with ratio
            // mean/(N+2) < 1 once N ≥ mode.
            let tail = next / (1.0 - mean / (n as f64 + 2.0));
            let total: f64 = weights.iter().sum();
            if tail / total < tolerance {
                weights.iter_mut().for_each(|w| *w /= total);
                return Self {
                    weights,
                    tail_bound: tail / total,
                };
            }
            weights.push(next);
        }
    }

    pub fn cutoff(&self) -> usize {
        self.weights.len() - 1
    }
}

/// Jump matrix `R = I − H/Λ`; `Λ = 0` yields the identity.
pub fn jump_matrix(generator: &Matrix, rate: f64) -> Matrix {
    let n = generator.dim();
    if rate == 0.0 {
        return Matrix::identity(n);
    }
    let mut r = Matrix::identity(n);
    r.axpy(-1.0 / rate, generator);
    // Clamp the rounding residue on the diagonal of the fastest vertex.
    for i in 0..n {
        if r[(i, i)] < 0.0 && r[(i, i)] > -1e-14 {
            r[(i, i)] = 0.0;
        }
    }
    r
}

/// `e^{−tH}` for a generator whose off-diagonal entries are ≤ 0 and whose
/// row sums are ≥ 0. Returns the matrix, the rate Λ and the tail bound.
pub fn uniformized_exponential(generator: &Matrix, t: f64, tolerance: f64) -> (Matrix, f64, f64) {
    let n = generator.dim();
    let rate = (0..n).map(|i| generator[(i, i)]).fold(0.0, f64::max);
    let r = jump_matrix(generator, rate);
    let poisson = PoissonWeights::new(rate * t, tolerance);
    let mut acc = Matrix::zeros(n);
    let mut power = Matrix::identity(n);
    for (k, &w) in poisson.weights.iter().enumerate() {
        if w > 0.0 {
            acc.axpy(w, &power);
        }
        if k < poisson.cutoff() {
            power = power.matmul(&r);
        }
    }
    (acc, rate, poisson.tail_bound)
}

/// Evaluated kernel `p(t,·,·)` on a finite graph.
#[derive(Clone, Debug)]
pub struct HeatKernelTable {
    pub t: f64,
    pub values: Matrix,
    pub mu: Vec<f64>,
    pub labels: Vec<String>,
    pub uniformization_rate: f64,
    pub truncation_error_bound: f64,
    /// max |p(t,x,y) − p(t,y,x)| before the stored table was symmetrized.
    pub presymmetry_defect: f64,
    pub graph_hash: u64,
}

impl HeatKernelTable {
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[(x, y)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.mu.len()).map(|x| self.values[(x, x)]).collect()
    }

    /// Σ_z p(t,x,z) μ(z) for every x.
    pub fn masses(&self) -> Vec<f64> {
        (0..self.mu.len())
            .map(|x| self.values.row(x).iter().zip(&self.mu).map(|(p, m)| p * m).sum())
            .collect()
    }

    pub fn min_entry(&self) -> f64 {
        self.values.as_slice().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// The operator matrix `e^{−tH}[x,y] = p(t,x,y) μ(y)`.
    pub fn operator(&self) -> Matrix {
        Matrix::from_fn(self.mu.len(), |x, y| self.values[(x, y)] * self.mu[y])
    }

    /// Header row of labels, then one row of values per vertex.
    pub fn to_csv(&self) -> String {
        let mut out = self.labels.join(",");
        out.push('\n');
        for x in 0..self.mu.len() {
            let row: Vec<String> = self.values.row(x).iter().map(|v| format!("{v:e}")).collect();
            writeln!(out, "{}", row.join(",")).unwrap();
        }
        out
    }

    /// 16-byte header (magic, n as u32 LE, t as f64 LE) followed by the
    /// row-major values as f64 LE.
    pub fn to_binary(&self) -> Vec<u8> {
        let n = self.mu.len();
        let mut out = Vec::with_capacity(16 + 8 * n * n);
        out.extend_from_slice(&BINARY_MAGIC);
        out.extend_from_slice(&(n as u32).to_le_bytes());
        out.extend_from_slice(&self.t.to_le_bytes());
        for v in self.values.as_slice() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }
}

/// Reads a binary dump back into `(t, values)`.
pub fn read_binary_kernel(bytes: &[u8]) -> Result<(f64, Matrix)> {
    let bad = |msg: &str| Error::Parse {
        line: 0,
        msg: msg.to_string(),
    };
    if bytes.len() < 16 || bytes[..4] != BINARY_MAGIC {
        return Err(bad("not a kernel dump"));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let t = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
    if bytes.len() != 16 + 8 * n * n {
        return Err(bad("truncated kernel dump"));
    }
    let vals: Vec<f64> = bytes[16..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((t, Matrix::from_fn(n, |i, j| vals[i * n + j])))
}

#[derive(Clone, Copy, Debug)]
pub struct KernelOptions {
    pub tail_tolerance: f64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonpositiveTime(t))
    }
}

/// Heat kernel of a connected finite graph at time `t`.
pub fn heat_semigroup(graph: &WeightedGraph, t: f64) -> Result<HeatKernelTable> {
    heat_semigroup_with(graph, t, KernelOptions::default())
}

pub fn heat_semigroup_with(graph: &WeightedGraph, t: f64, opts: KernelOptions) -> Result<HeatKernelTable> {
    check_time(t)?;
    let comps = graph.connected_components().len();
    if comps > 1 {
        return Err(Error::DisconnectedGraph(comps));
    }
    Ok(kernel_table(graph, t, opts))
}

/// Same as [`heat_semigroup`] without the connectivity gate; used where
/// positivity is not needed.
pub(crate) fn kernel_table(graph: &WeightedGraph, t: f64, opts: KernelOptions) -> HeatKernelTable {
    let (e, rate, tail) = uniformized_exponential(&graph.generator(), t, opts.tail_tolerance);
    let mu = graph.mu().to_vec();
    let mut values = Matrix::from_fn(graph.len(), |x, y| e[(x, y)] / mu[y]);
    let presymmetry_defect = values.asymmetry();
    values.symmetrize();
    HeatKernelTable {
        t,
        values,
        mu,
        labels: graph.labels().to_vec(),
        uniformization_rate: rate,
        truncation_error_bound: tail,
        presymmetry_defect,
        graph_hash: graph.content_hash(),
    }
}

/// Concurrent `(graph, t)`-keyed store of finished tables.
#[derive(Debug, Default)]
pub struct KernelCache {
    tables: RwLock<HashMap<(u64, u64), Arc<HeatKernelTable>>>,
}

impl KernelCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute(&self, graph: &WeightedGraph, t: f64) -> Result<Arc<HeatKernelTable>> {
        let key = (graph.content_hash(), t.to_bits());
        if let Some(hit) = self.tables.read().unwrap().get(&key) {
            return Ok(Arc::clone(hit));
        }
        let table = Arc::new(heat_semigroup(graph, t)?);
        let mut map = self.tables.write().unwrap();
        Ok(Arc::clone(map.entry(key).or_insert(table)))
    }

    pub fn len(&self) -> usize {
        self.tables.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Nested vertex sets `K_1 ⊂ K_2 ⊂ …`.
#[derive(Clone, Debug)]
pub struct Exhaustion<V> {
    sets: Vec<Vec<V>>,
}

impl<V: Clone + Eq + std::hash::Hash + std::fmt::Debug> Exhaustion<V> {
    pub fn new(sets: Vec<Vec<V>>) -> Result<Self> {
        for (i, pair) in sets.windows(2).enumerate() {
            if !pair[0].iter().all(|v| pair[1].contains(v)) {
                return Err(Error::NotNested(i + 1));
            }
        }
        Ok(Self { sets })
    }

    pub fn sets(&self) -> &[Vec<V>] {
        &self.sets
    }
}

impl Exhaustion<i64> {
    /// Balls `{−r, …, r}` of the integer line for each radius.
    pub fn balls(radii: &[i64]) -> Result<Self> {
        Self::new(radii.iter().map(|&r| (-r..=r).collect()).collect())
    }
}

/// Dirichlet-truncated generator on `region`: off-diagonal couplings inside
/// the region, full weighted degree on the diagonal (edges leaving the
/// region kill the walker).
pub fn killed_generator<G: LocallyFiniteGraph>(graph: &G, region: &[G::Vertex]) -> Matrix {
    let index: HashMap<&G::Vertex, usize> = region.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut h = Matrix::zeros(region.len());
    for (i, v) in region.iter().enumerate() {
        let mu = graph.measure(v);
        for (y, b) in graph.neighbors_of(v) {
            h[(i, i)] += b / mu;
            if let Some(&j) = index.get(&y) {
                h[(i, j)] -= b / mu;
            }
        }
    }
    h
}

/// `p_K(t,x,y)` for the Dirichlet truncation to `region`.
pub fn killed_kernel<G: LocallyFiniteGraph>(
    graph: &G,
    region: &[G::Vertex],
    t: f64,
    x: &G::Vertex,
    y: &G::Vertex,
) -> Result<f64> {
    check_time(t)?;
    let ix = region.iter().position(|v| v == x);
    let iy = region.iter().position(|v| v == y);
    let (Some(ix), Some(iy)) = (ix, iy) else {
        return Err(Error::VertexOutsideExhaustion(format!("{x:?}/{y:?}")));
    };
    let (e, _, _) = uniformized_exponential(&killed_generator(graph, region), t, DEFAULT_TAIL_TOLERANCE);
    Ok(e[(ix, iy)] / graph.measure(y))
}

#[derive(Clone, Debug)]
pub struct MinimalKernelSequence {
    pub values: Vec<f64>,
    /// Difference between the last two values; a convergence proxy.
    pub last_gap: f64,
}

/// Killed kernels along an exhaustion. They increase to the minimal heat
/// kernel of the ambient graph.
pub fn minimal_heat_kernel<G: LocallyFiniteGraph>(
    graph: &G,
    exhaustion: &Exhaustion<G::Vertex>,
    t: f64,
    x: &G::Vertex,
    y: &G::Vertex,
) -> Result<MinimalKernelSequence> {
    check_time(t)?;
    let first = exhaustion
        .sets()
        .first()
        .ok_or_else(|| Error::VertexOutsideExhaustion(format!("{x:?}")))?;
    for v in [x, y] {
        if !first.contains(v) {
            return Err(Error::VertexOutsideExhaustion(format!("{v:?}")));
        }
    }
    let values = exhaustion
        .sets()
        .iter()
        .map(|k| killed_kernel(graph, k, t, x, y))
        .collect::<Result<Vec<_>>>()?;
    let last_gap = match values.len() {
        0 | 1 => f64::NAN,
        n => values[n - 1] - values[n - 2],
    };
    Ok(MinimalKernelSequence { values, last_gap })
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct AxiomReport {
    pub s: f64,
    pub t: f64,
    pub chapman_kolmogorov: f64,
    pub symmetry: f64,
    pub presymmetry: f64,
    pub mass_min: f64,
    pub mass_max: f64,
    pub mass_excess: f64,
    pub min_entry: f64,
    pub passed: bool,
}

/// Threshold applied by [`verify_axioms`].
pub const AXIOM_TOLERANCE: f64 = 1e-10;

/// Checks the semigroup identity, symmetry and sub-Markov mass on three
/// tables at times `s`, `t` and `s + t`.
pub fn verify_axioms(
    at_s: &HeatKernelTable,
    at_t: &HeatKernelTable,
    at_sum: &HeatKernelTable,
) -> Result<AxiomReport> {
    if at_s.graph_hash != at_t.graph_hash || at_t.graph_hash != at_sum.graph_hash {
        return Err(Error::GraphMismatch);
    }
    let tol = 1e-12 * (at_s.t + at_t.t);
    if (at_sum.t - (at_s.t + at_t.t)).abs() > tol {
        return Err(Error::Config(format!(
            "third table must be at s + t = {}, got {}",
            at_s.t + at_t.t,
            at_sum.t
        )));
    }
    let n = at_s.mu.len();
    let mut ck = 0.0_f64;
    for x in 0..n {
        for y in 0..n {
            let conv: f64 = (0..n).map(|z| at_s.get(x, z) * at_t.get(z, y) * at_s.mu[z]).sum();
            ck = ck.max((at_sum.get(x, y) - conv).abs());
        }
    }
    let tables = [at_s, at_t, at_sum];
    let symmetry = tables.iter().map(|t| t.values.asymmetry()).fold(0.0, f64::max);
    let presymmetry = tables.iter().map(|t| t.presymmetry_defect).fold(0.0, f64::max);
    let masses: Vec<f64> = tables.iter().flat_map(|t| t.masses()).collect();
    let mass_min = masses.iter().copied().fold(f64::INFINITY, f64::min);
    let mass_max = masses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mass_excess = mass_max - 1.0;
    let min_entry = tables.iter().map(|t| t.min_entry()).fold(f64::INFINITY, f64::min);
    let passed = ck <= AXIOM_TOLERANCE && symmetry <= AXIOM_TOLERANCE && mass_excess <= AXIOM_TOLERANCE;
    Ok(AxiomReport {
        s: at_s.t,
        t: at_t.t,
        chapman_kolmogorov: ck,
        symmetry,
        presymmetry,
        mass_min,
        mass_max,
        mass_excess,
        min_entry,
        passed,
    })
}

/// Sequence `(t, p(t,x,x) μ(x))` along a decreasing grid; tends to 1.
pub fn on_diagonal_scan(graph: &WeightedGraph, x: usize, t_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    graph.weighted_degree(x)?;
    t_grid
        .iter()
        .map(|&t| Ok((t, heat_semigroup(graph, t)?.get(x, x) * graph.mu()[x])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{families, GraphBuilder, IntegerLine};
    use crate::linalg::symmetric_eigen;
    use proptest::prelude::*;

    /// Independent spectral route: p = D^{-1/2} V e^{−tΛ} Vᵀ D^{-1/2}.
    fn spectral_kernel(g: &WeightedGraph, t: f64) -> Matrix {
        let eig = symmetric_eigen(&g.symmetric_generator(), true).unwrap();
        let v = eig.vectors.unwrap();
        let n = g.len();
        Matrix::from_fn(n, |x, y| {
            let s: f64 = (0..n).map(|k| v[(x, k)] * (-t * eig.values[k]).exp() * v[(y, k)]).sum();
            s / (g.mu()[x] * g.mu()[y]).sqrt()
        })
    }

    #[test]
    fn poisson_weights_sum_and_tail() {
        for mean in [0.0, 0.3, 1.0, 7.5, 40.0, 900.0] {
            let p = PoissonWeights::new(mean, 1e-14);
            let s: f64 = p.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "mean {mean}: sum {s}");
            assert!(p.tail_bound < 1e-14);
        }
    }

    #[test]
    fn two_vertex_closed_form() {
        let g = families::two_vertex(1.0, [1.0, 1.0]);
        for t in [0.01, 0.5, 1.0, 3.0] {
            let k = heat_semigroup(&g, t).unwrap();
            let diag = (1.0 + (-2.0 * t).exp()) / 2.0;
            assert!((k.get(0, 0) - diag).abs() < 1e-14);
            assert!((k.get(0, 1) - (1.0 - diag)).abs() < 1e-14);
        }
    }

    #[test]
    fn small_time_diagonal_tends_to_inverse_measure() {
        let g = families::random_connected(6, 0.4, (0.2, 1.5), (0.5, 2.0), 11);
        let k = heat_semigroup(&g, 1e-6).unwrap();
        for x in 0..g.len() {
            assert!((k.get(x, x) * g.mu()[x] - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn isolated_vertex_is_constant() {
        let g = families::single_vertex(3.0);
        for t in [0.1, 1.0, 100.0] {
            assert!((heat_semigroup(&g, t).unwrap().get(0, 0) - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn errors() {
        let g = families::two_vertex(1.0, [1.0, 1.0]);
        assert!(matches!(heat_semigroup(&g, 0.0), Err(Error::NonpositiveTime(_))));
        let mut b = GraphBuilder::new("split");
        b.vertex("a", 1.0);
        b.vertex("b", 1.0);
        assert!(matches!(heat_semigroup(&b.validate().unwrap(), 1.0), Err(Error::DisconnectedGraph(2))));
    }

    #[test]
    fn killed_single_vertex_is_scalar_exponential() {
        let g = families::path(5);
        let x = 2;
        let ex = Exhaustion::new(vec![vec![x]]).unwrap();
        for t in [0.1, 1.0, 2.5] {
            let seq = minimal_heat_kernel(&g, &ex, t, &x, &x).unwrap();
            let deg = g.weighted_degree(x).unwrap();
            assert!((seq.values[0] - (-deg * t).exp() / g.mu()[x]).abs() < 1e-15);
        }
    }

    #[test]
    fn exhaustion_stabilizes_at_full_kernel() {
        let g = families::random_connected(6, 0.4, (0.2, 1.5), (0.5, 2.0), 5);
        let ex = Exhaustion::new(vec![vec![0, 1], vec![0, 1, 2, 3], (0..6).collect()]).unwrap();
        let seq = minimal_heat_kernel(&g, &ex, 0.7, &0, &1).unwrap();
        let full = heat_semigroup(&g, 0.7).unwrap();
        assert!((seq.values[2] - full.get(0, 1)).abs() < 1e-13);
        for w in seq.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
        assert!(matches!(
            minimal_heat_kernel(&g, &ex, 0.7, &4, &1),
            Err(Error::VertexOutsideExhaustion(_))
        ));
        assert!(matches!(Exhaustion::new(vec![vec![0, 1], vec![1]]), Err(Error::NotNested(1))));
    }

    #[test]
    fn integer_line_exhaustion_increases() {
        let ex = Exhaustion::balls(&[1, 2, 4, 8, 16]).unwrap();
        let seq = minimal_heat_kernel(&IntegerLine, &ex, 1.0, &0, &0).unwrap();
        for w in seq.values.windows(2) {
            assert!(w[0] < w[1]);
        }
        // Z kernel at the origin: e^{−2t} I_0(2t); I_0(2) = 2.2795853023360673.
        let exact = (-2.0f64).exp() * 2.279_585_302_336_067;
        assert!((seq.values.last().unwrap() - exact).abs() < 1e-12);
        assert!(seq.last_gap.abs() < 1e-12);
    }

    #[test]
    fn axioms_two_vertex() {
        let g = families::two_vertex(1.0, [1.0, 1.0]);
        let a = heat_semigroup(&g, 0.5).unwrap();
        let b = heat_semigroup(&g, 1.0).unwrap();
        let r = verify_axioms(&a, &a, &b).unwrap();
        assert!(r.chapman_kolmogorov < 1e-12);
        assert_eq!(r.symmetry, 0.0);
        assert!(r.mass_excess <= 1e-12);
        assert!(r.passed);
        let other = heat_semigroup(&families::path(3), 0.5).unwrap();
        assert!(matches!(verify_axioms(&a, &other, &b), Err(Error::GraphMismatch)));
    }

    #[test]
    fn on_diagonal_values() {
        let g = families::two_vertex(1.0, [1.0, 1.0]);
        let scan = on_diagonal_scan(&g, 0, &[0.1]).unwrap();
        assert!((scan[0].1 - (1.0 + (-0.2f64).exp()) / 2.0).abs() < 1e-14);
        assert!((scan[0].1 - 0.90937).abs() < 1e-5);

        let single = on_diagonal_scan(&families::single_vertex(2.0), 0, &[1.0, 0.1]).unwrap();
        assert!(single.iter().all(|&(_, v)| (v - 1.0).abs() < 1e-15));

        // K_3: p(t,x,x) = 1/3 + (2/3) e^{−3t}
        let grid = [1.0, 0.5, 0.1, 0.01, 0.001];
        let k3 = on_diagonal_scan(&families::complete(3), 0, &grid).unwrap();
        for (&(t, v), w) in k3.iter().zip(k3.iter().skip(1)) {
            assert!((v - (1.0 / 3.0 + 2.0 / 3.0 * (-3.0 * t).exp())).abs() < 1e-14);
            assert!(w.1 > v);
        }
    }

    #[test]
    fn table_exports() {
        let g = families::path(3);
        let k = heat_semigroup(&g, 0.25).unwrap();
        let csv = k.to_csv();
        assert!(csv.starts_with("1,2,3\n"));
        assert_eq!(csv.lines().count(), 4);
        let bin = k.to_binary();
        assert_eq!(bin.len(), 16 + 8 * 9);
        let (t, m) = read_binary_kernel(&bin).unwrap();
        assert_eq!(t, 0.25);
        assert_eq!(m, k.values);
    }

    #[test]
    fn cache_reuses_tables() {
        let cache = KernelCache::new();
        let g = families::path(4);
        let a = cache.get_or_compute(&g, 0.5).unwrap();
        let b = cache.get_or_compute(&g, 0.5).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        std::thread::scope(|s| {
            for i in 0..4 {
                let (cache, g) = (&cache, &g);
                s.spawn(move || cache.get_or_compute(g, 0.1 * (i % 2 + 1) as f64).unwrap());
            }
        });
        assert_eq!(cache.len(), 3);
    }

    fn graph_strategy() -> impl Strategy<Value = WeightedGraph> {
        (2usize..8, any::<u64>()).prop_map(|(n, seed)| families::random_connected(n, 0.3, (0.1, 2.0), (0.3, 3.0), seed))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn kernel_invariants(g in graph_strategy(), s in 0.01f64..2.0, t in 0.01f64..2.0) {
            let a = heat_semigroup(&g, s).unwrap();
            let b = heat_semigroup(&g, t).unwrap();
            let c = heat_semigroup(&g, s + t).unwrap();
            let r = verify_axioms(&a, &b, &c).unwrap();
            prop_assert!(r.passed, "{:?}", r);
            prop_assert!(r.presymmetry < 1e-12);
            prop_assert!(r.mass_min >= 1.0 - 1e-12 && r.mass_max <= 1.0 + 1e-12);
            prop_assert!(a.min_entry() > 0.0);
            for x in 0..g.len() {
                for y in 0..g.len() {
                    prop_assert!(a.get(x, y) <= 1.0 / g.mu()[x] + 1e-12);
                }
            }
            prop_assert!(a.values.max_abs_diff(&spectral_kernel(&g, s)) < 1e-10);
        }

        #[test]
        fn domain_monotonicity(g in graph_strategy(), t in 0.05f64..2.0, cut in 1usize..7) {
            let n = g.len();
            let cut = cut.min(n);
            let sets: Vec<Vec<usize>> = (cut..=n).map(|k| (0..k).collect()).collect();
            let ex = Exhaustion::new(sets).unwrap();
            let seq = minimal_heat_kernel(&g, &ex, t, &0, &0).unwrap();
            for w in seq.values.windows(2) {
                prop_assert!(w[0] <= w[1] + 1e-15);
            }
        }

        #[test]
        fn contraction_spectrum(g in graph_strategy(), t in 0.05f64..2.0) {
            let k = heat_semigroup(&g, t).unwrap();
            let mut sym = Matrix::from_fn(g.len(), |x, y| k.get(x, y) * (g.mu()[x] * g.mu()[y]).sqrt());
            sym.symmetrize();
            let vals = crate::linalg::symmetric_eigenvalues(&sym).unwrap();
            prop_assert!(vals.iter().all(|&v| v > 0.0 && v <= 1.0 + 1e-12));
            prop_assert_eq!(vals.iter().filter(|&&v| (v - 1.0).abs() < 1e-10).count(), 1);
        }
    }
}
