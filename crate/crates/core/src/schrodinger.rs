//! Schrödinger operators `H(w) = H + w` on finite graphs, their semigroup
//! traces, the small-time scan of `Ψ(t) tr e^{−t H(w/t)}`, and the
//! Golden-Thompson upper bound.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::heat_kernel::{heat_semigroup, kernel_table, KernelOptions};
use crate::linalg::{symmetric_eigen, symmetric_eigenvalues, Matrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::sync::Arc;

/// Real potential on the vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    values: Vec<f64>,
}

impl Potential {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("potential value {bad} is not finite")));
        }
        Ok(Self { values })
    }

    pub fn zero(n: usize) -> Self {
        Self { values: vec![0.0; n] }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self { values: vec![c; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// w⁺ = max(w, 0)
    pub fn positive_part(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v.max(0.0)).collect()
    }

    /// w⁻ = max(−w, 0)
    pub fn negative_part(&self) -> Vec<f64> {
        self.values.iter().map(|&v| (-v).max(0.0)).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn check(&self, graph: &WeightedGraph) -> Result<()> {
        if self.values.len() == graph.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: graph.len(),
                got: self.values.len(),
            })
        }
    }
}

/// The pair `(Ψ, ϱ₂)` plus the on-diagonal limit `lim p(t,x,x) Ψ(t)` that
/// enters the target integral.
#[derive(Clone)]
pub struct AsymptoticControlPair {
    pub psi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub rho2: Vec<f64>,
    pub diagonal_limit: Vec<f64>,
    pub phi_bound: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl std::fmt::Debug for AsymptoticControlPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AsymptoticControlPair")
            .field("rho2", &self.rho2)
            .field("diagonal_limit", &self.diagonal_limit)
            .finish_non_exhaustive()
    }
}

impl AsymptoticControlPair {
    /// On graphs: Ψ ≡ 1, ϱ₂ = 1/μ, and p(t,x,x) → 1/μ(x).
    pub fn graph(graph: &WeightedGraph) -> Self {
        let inv: Vec<f64> = graph.mu().iter().map(|m| 1.0 / m).collect();
        Self {
            psi: Arc::new(|_| 1.0),
            rho2: inv.clone(),
            diagonal_limit: inv,
            phi_bound: Some(Arc::new(|_| 1.0)),
        }
    }
}

/// `S = D^{1/2}(H + diag w)D^{−1/2}`, symmetric and isospectral to `H(w)`.
#[derive(Clone, Debug)]
pub struct SchrodingerOperator {
    pub matrix: Matrix,
}

impl SchrodingerOperator {
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        symmetric_eigenvalues(&self.matrix)
    }

    pub fn eigen(&self) -> Result<SymmetricEigen> {
        symmetric_eigen(&self.matrix, true)
    }
}

pub fn schrodinger_operator(graph: &WeightedGraph, w: &Potential) -> Result<SchrodingerOperator> {
    w.check(graph)?;
    let mut matrix = graph.symmetric_generator();
    for (x, v) in w.values().iter().enumerate() {
        matrix[(x, x)] += v;
    }
    Ok(SchrodingerOperator { matrix })
}

/// tr e^{−t H(w)} from the full spectrum.
pub fn trace_semigroup(graph: &WeightedGraph, w: &Potential, t: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::NonpositiveTime(t));
    }
    let vals = schrodinger_operator(graph, w)?.eigenvalues()?;
    Ok(vals.iter().map(|l| (-t * l).exp()).sum())
}

/// tr e^{−t H(w/t)} = tr e^{−(tH + w)}, assembled without dividing by t.
pub fn semiclassical_trace(graph: &WeightedGraph, w: &Potential, t: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::NonpositiveTime(t));
    }
    w.check(graph)?;
    let mut m = graph.symmetric_generator();
    m.scale(t);
    for (x, v) in w.values().iter().enumerate() {
        m[(x, x)] += v;
    }
    Ok(symmetric_eigenvalues(&m)?.iter().map(|l| (-l).exp()).sum())
}

/// Both sides of tr e^{−tH(w)} ≤ Σ_x p(t,x,x) e^{−t w(x)} μ(x).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GoldenThompson {
    pub lhs: f64,
    pub rhs: f64,
}

impl GoldenThompson {
    pub fn gap(&self) -> f64 {
        self.rhs - self.lhs
    }
}

pub fn golden_thompson_check(graph: &WeightedGraph, w: &Potential, t: f64) -> Result<GoldenThompson> {
    let lhs = trace_semigroup(graph, w, t)?;
    let rhs = golden_thompson_rhs(graph, w, t);
    Ok(GoldenThompson { lhs, rhs })
}

fn golden_thompson_rhs(graph: &WeightedGraph, w: &Potential, t: f64) -> f64 {
    let table = kernel_table(graph, t, KernelOptions::default());
    table
        .diagonal()
        .iter()
        .zip(w.values())
        .zip(graph.mu())
        .map(|((p, wx), m)| p * (-t * wx).exp() * m)
        .sum()
}

/// Geometric grid `t0 · ratio^k`, `k = 0..count`.
pub fn geometric_grid(t0: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| t0 * ratio.powi(k as i32)).collect()
}

/// Default scan grid: `2^{−k}`, twenty points from 1.
pub fn default_grid() -> Vec<f64> {
    geometric_grid(1.0, 0.5, 20)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub converged: bool,
    pub final_error: f64,
    pub relative_final_error: f64,
    pub tolerance: f64,
    /// Errors over the last `tail_window` grid points never increase.
    pub tail_nonincreasing: bool,
    pub tail_window: usize,
    /// Least-squares slope of log(error) against log(t) on the tail; only
    /// reported.
    pub empirical_order: Option<f64>,
    pub gt_respected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub t_grid: Vec<f64>,
    pub scaled_traces: Vec<f64>,
    pub target: f64,
    pub abs_errors: Vec<f64>,
    pub gt_bounds: Vec<f64>,
    pub verdict: Verdict,
}

/// Settings for judging a scan.
#[derive(Clone, Copy, Debug)]
pub struct ScanTolerance {
    /// Allowed |error| at the smallest t, relative to the target.
    pub relative: f64,
    pub tail_window: usize,
    /// Slack for the Golden-Thompson comparison.
    pub gt_slack: f64,
}

impl Default for ScanTolerance {
    fn default() -> Self {
        Self {
            relative: 0.01,
            tail_window: 5,
            gt_slack: 1e-10,
        }
    }
}

impl ConvergenceReport {
    pub(crate) fn assemble(
        t_grid: Vec<f64>,
        scaled_traces: Vec<f64>,
        target: f64,
        gt_bounds: Vec<f64>,
        tol: ScanTolerance,
    ) -> Self {
        let abs_errors: Vec<f64> = scaled_traces.iter().map(|s| (s - target).abs()).collect();
        let final_error = *abs_errors.last().expect("non-empty grid");
        let relative_final_error = final_error / target.abs();
        let window = tol.tail_window.min(abs_errors.len());
        let tail = &abs_errors[abs_errors.len() - window..];
        let tail_nonincreasing = tail.windows(2).all(|w| w[1] <= w[0]);
        let ts = &t_grid[t_grid.len() - window..];
        let empirical_order = log_slope(ts, tail);
        let gt_respected = scaled_traces
            .iter()
            .zip(&gt_bounds)
            .all(|(s, g)| *s <= g + tol.gt_slack * g.abs().max(1.0));
        let converged = relative_final_error <= tol.relative && tail_nonincreasing;
        Self {
            verdict: Verdict {
                converged,
                final_error,
                relative_final_error,
                tolerance: tol.relative,
                tail_nonincreasing,
                tail_window: window,
                empirical_order,
                gt_respected,
            },
            t_grid,
            scaled_traces,
            target,
            abs_errors,
            gt_bounds,
        }
    }

    /// Columns: t, scaled_trace, target, abs_error, gt_rhs.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,scaled_trace,target,abs_error,gt_rhs\n");
        for i in 0..self.t_grid.len() {
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e}",
                self.t_grid[i], self.scaled_traces[i], self.target, self.abs_errors[i], self.gt_bounds[i]
            )
            .unwrap();
        }
        out
    }
}

fn log_slope(ts: &[f64], errs: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .zip(errs)
        .filter(|(_, e)| **e > 0.0)
        .map(|(t, e)| (t.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Σ_x e^{−w(x)} L(x) μ(x), summed directly.
pub fn limit_integral(graph: &WeightedGraph, w: &Potential, pair: &AsymptoticControlPair) -> f64 {
    w.values()
        .iter()
        .zip(&pair.diagonal_limit)
        .zip(graph.mu())
        .map(|((wx, l), m)| (-wx).exp() * l * m)
        .sum()
}

/// Scans `Ψ(t) tr e^{−t H(w/t)}` along the grid and compares it with the
/// limit integral. Grid points are evaluated in parallel and reported in
/// grid order.
pub fn semiclassical_scan(
    graph: &WeightedGraph,
    w: &Potential,
    pair: &AsymptoticControlPair,
    t_grid: &[f64],
    tol: ScanTolerance,
) -> Result<ConvergenceReport> {
    if t_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    w.check(graph)?;
    let rows = t_grid
        .par_iter()
        .map(|&t| {
            let psi = (pair.psi)(t);
            let trace = semiclassical_trace(graph, w, t)?;
            // Golden-Thompson applied to H(w/t).
            let gt = golden_thompson_rhs(graph, &w.scaled(1.0 / t), t);
            Ok((psi * trace, psi * gt))
        })
        .collect::<Result<Vec<_>>>()?;
    let (scaled, gt): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    let target = limit_integral(graph, w, pair);
    Ok(ConvergenceReport::assemble(t_grid.to_vec(), scaled, target, gt, tol))
}

/// Convenience: the canonical graph pair, heat kernel checked for
/// connectivity first.
pub fn graph_semiclassical_scan(
    graph: &WeightedGraph,
    w: &Potential,
    t_grid: &[f64],
    tol: ScanTolerance,
) -> Result<ConvergenceReport> {
    if let Some(&t) = t_grid.first() {
        heat_semigroup(graph, t)?;
    }
    semiclassical_scan(graph, w, &AsymptoticControlPair::graph(graph), t_grid, tol)
}
