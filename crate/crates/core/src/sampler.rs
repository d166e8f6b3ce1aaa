//! Monte Carlo over jump paths of the graph process.
//!
//! Free paths follow the minimal jump process: exponential holding with rate
//! `Deg(z)`, then a jump to `y` with probability `b(z,y) / Σ_y' b(z,y')`.
//!
//! Bridges (paths pinned to end at `y` at time `t`) are drawn exactly through
//! uniformization: the number of Poisson clock rings `N` is sampled with
//! weights `Poisson(N; Λt) · R^N[x,y]`, the ring times are sorted uniforms on
//! `(0,t)`, and the skeleton is drawn forward with the endpoint-conditioned
//! transition `R[z_{k−1}, z] · R^{N−k}[z, y]`. Self-transitions are virtual
//! and removed from the returned path.
//!
//! # Random streams
//!
//! Every estimator derives its generators from one master seed. Sample `i`
//! of stratum `s` (the diagonal vertex for trace estimators, 0 otherwise)
//! belongs to chunk `c = i / CHUNK_SIZE`, which draws from
//! `ChaCha8Rng::seed_from_u64(seed)` with stream id `s · 2^32 + c`. Chunks are
//! run on the rayon pool and merged in chunk order, so results do not depend
//! on the thread count.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::heat_kernel::{jump_matrix, PoissonWeights};
use crate::schrodinger::Potential;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Samples per random stream.
pub const CHUNK_SIZE: usize = 4096;

/// Allowed Poisson mass beyond the jump-count cap, relative to the bridge
/// normaliser.
pub const BRIDGE_TAIL_TOLERANCE: f64 = 1e-12;

/// Right-continuous pure-jump path on `[0, horizon]`.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpPath {
    pub start: usize,
    /// `(time, new state)`, times strictly increasing in `(0, horizon)`.
    pub jumps: Vec<(f64, usize)>,
    pub horizon: f64,
    pub exploded: bool,
}

impl JumpPath {
    /// γ(s): the target of the last jump at or before `s`.
    pub fn state_at(&self, s: f64) -> usize {
        let k = self.jumps.partition_point(|&(time, _)| time <= s);
        if k == 0 {
            self.start
        } else {
            self.jumps[k - 1].1
        }
    }

    /// γ(s⁻)
    pub fn left_limit(&self, s: f64) -> usize {
        let k = self.jumps.partition_point(|&(time, _)| time < s);
        if k == 0 {
            self.start
        } else {
            self.jumps[k - 1].1
        }
    }

    pub fn end(&self) -> usize {
        self.left_limit(self.horizon)
    }

    pub fn jump_count(&self) -> usize {
        self.jumps.len()
    }

    /// Visited states with their holding intervals `(state, from, to)`.
    pub fn segments(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        let starts = std::iter::once((0.0, self.start)).chain(self.jumps.iter().copied());
        let ends = self.jumps.iter().map(|j| j.0).chain(std::iter::once(self.horizon));
        starts.zip(ends).map(|((a, z), b)| (z, a, b))
    }

    /// ∫₀ᵗ w(γ(s)) ds, summed exactly over holding intervals.
    pub fn integral(&self, w: &[f64]) -> f64 {
        self.segments().map(|(z, a, b)| w[z] * (b - a)).sum()
    }

    /// Time spent at `z` within `[a, b]`.
    pub fn occupation(&self, z: usize, a: f64, b: f64) -> f64 {
        self.segments()
            .filter(|seg| seg.0 == z)
            .map(|(_, s, e)| (e.min(b) - s.max(a)).max(0.0))
            .sum()
    }

    /// γ(s) ∈ K for all s ∈ [0, t).
    pub fn stays_in(&self, inside: &[bool]) -> bool {
        inside[self.start] && self.jumps.iter().all(|&(_, z)| inside[z])
    }

    /// Jump times strictly increase inside `(0, horizon)` and every jump
    /// changes state.
    pub fn is_well_formed(&self) -> bool {
        let mut prev_t = 0.0;
        let mut prev_z = self.start;
        for &(time, z) in &self.jumps {
            if !(time > prev_t && time < self.horizon) || z == prev_z {
                return false;
            }
            prev_t = time;
            prev_z = z;
        }
        true
    }
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl McEstimate {
    /// |mean − reference| in units of the standard error (∞ when the error
    /// is zero and the values differ).
    pub fn z_score(&self, reference: f64) -> f64 {
        let d = (self.mean - reference).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }

    pub fn csv_header() -> &'static str {
        "label,mean,std_error,n_samples,seed"
    }

    pub fn csv_row(&self, label: &str) -> String {
        format!("{label},{:e},{:e},{},{}", self.mean, self.std_error, self.n_samples, self.seed)
    }
}

/// Running mean and centred second moment, merged by Chan's rule.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64,
        }
    }

    fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }
}

/// Generator for chunk `chunk` of stratum `stratum`.
pub fn stream_rng(seed: u64, stratum: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((stratum << 32) | chunk);
    rng
}

fn sample_moments<F>(n: usize, seed: u64, stratum: u64, draw: F) -> Result<Moments>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let chunks = n.div_ceil(CHUNK_SIZE);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, stratum, c as u64);
            let len = CHUNK_SIZE.min(n - c * CHUNK_SIZE);
            let mut m = Moments::default();
            for _ in 0..len {
                m.push(draw(&mut rng)?);
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().fold(Moments::default(), Moments::merge))
}

/// Plain Monte Carlo estimate of `E[draw]` over `n` samples.
pub fn estimate<F>(n: usize, seed: u64, draw: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let m = sample_moments(n, seed, 0, draw)?;
    Ok(McEstimate {
        mean: m.mean,
        std_error: (m.variance() / n as f64).sqrt(),
        n_samples: n,
        seed,
    })
}

fn categorical<R: Rng + ?Sized>(rng: &mut R, weights: impl Iterator<Item = (usize, f64)> + Clone) -> usize {
    let total: f64 = weights.clone().map(|(_, w)| w).sum();
    let mut u = rng.gen::<f64>() * total;
    let mut last = usize::MAX;
    for (z, w) in weights {
        if w <= 0.0 {
            continue;
        }
        last = z;
        if u < w {
            return z;
        }
        u -= w;
    }
    last
}

/// One path of the free process from `x` over `[0, t]`.
pub fn sample_free_path<R: Rng + ?Sized>(graph: &WeightedGraph, x: usize, t: f64, rng: &mut R) -> Result<JumpPath> {
    graph.weighted_degree(x)?;
    if t.is_nan() || t <= 0.0 {
        return Err(Error::NonpositiveTime(t));
    }
    let mut jumps = Vec::new();
    let mut z = x;
    let mut clock = 0.0;
    loop {
        let rate = graph.degrees()[z];
        if rate == 0.0 {
            break;
        }
        clock += -(1.0 - rng.gen::<f64>()).ln() / rate;
        if clock >= t {
            break;
        }
        z = categorical(rng, graph.neighbors(z).iter().copied());
        jumps.push((clock, z));
    }
    Ok(JumpPath {
        start: x,
        jumps,
        horizon: t,
        exploded: false,
    })
}

/// Exact bridge sampler for a fixed endpoint `y` and horizon `t`.
#[derive(Clone, Debug)]
pub struct BridgeSampler {
    target: usize,
    t: f64,
    rate: f64,
    n_max: usize,
    mu_target: f64,
    /// Sparse rows of `R`, self-loops included.
    rows: Vec<Vec<(usize, f64)>>,
    /// `R^n e_y` for `n = 0..=n_max`.
    to_target: Vec<Vec<f64>>,
    poisson: Vec<f64>,
    poisson_tail: f64,
}

impl BridgeSampler {
    pub fn new(graph: &WeightedGraph, y: usize, t: f64) -> Result<Self> {
        graph.weighted_degree(y)?;
        if t.is_nan() || t <= 0.0 {
            return Err(Error::NonpositiveTime(t));
        }
        let rate = graph.max_degree();
        let lt = rate * t;
        let n_max = (lt + 12.0 * lt.sqrt() + 30.0).ceil() as usize;
        let r = jump_matrix(&graph.generator(), rate);
        let n = graph.len();
        let rows: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|i| (0..n).filter(|&j| r[(i, j)] > 0.0).map(|j| (j, r[(i, j)])).collect())
            .collect();
        let mut to_target = Vec::with_capacity(n_max + 1);
        let mut v = vec![0.0; n];
        v[y] = 1.0;
        for _ in 0..=n_max {
            let next = (0..n).map(|i| rows[i].iter().map(|&(j, p)| p * v[j]).sum()).collect();
            to_target.push(std::mem::replace(&mut v, next));
        }
        let mut poisson = PoissonWeights::new(lt, 1e-17).weights;
        while poisson.len() <= n_max {
            let k = poisson.len() as f64;
            let last = *poisson.last().unwrap();
            poisson.push(if lt == 0.0 { 0.0 } else { last * lt / k });
        }
        poisson.truncate(n_max + 1);
        // Geometric bound on the Poisson mass past the cap.
        let next = poisson[n_max] * lt / (n_max as f64 + 1.0);
        // R is stochastic, so R^n e_y for n > cap is bounded by max R^cap e_y.
        let reach = to_target[n_max].iter().fold(0.0f64, |m, &v| m.max(v));
        let poisson_tail = reach * next / (1.0 - lt / (n_max as f64 + 2.0));
        Ok(Self {
            target: y,
            t,
            rate,
            n_max,
            mu_target: graph.mu()[y],
            rows,
            to_target,
            poisson,
            poisson_tail,
        })
    }

    pub fn jump_cap(&self) -> usize {
        self.n_max
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Unnormalised law of the ring count for a bridge from `x`.
    fn count_weights(&self, x: usize) -> Vec<f64> {
        self.poisson.iter().zip(&self.to_target).map(|(p, v)| p * v[x]).collect()
    }

    /// p(t, x, y) by the same uniformization sum the sampler uses.
    pub fn kernel(&self, x: usize) -> f64 {
        self.count_weights(x).iter().sum::<f64>() / self.mu_target
    }

    /// Precomputed cumulative ring-count law for bridges from `x`.
    pub fn from_start(&self, x: usize) -> Result<BridgeFrom<'_>> {
        if x >= self.rows.len() {
            return Err(Error::UnknownVertex(x.to_string()));
        }
        let weights = self.count_weights(x);
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroKernel(x, self.target));
        }
        let tail = self.poisson_tail / total;
        if tail > BRIDGE_TAIL_TOLERANCE {
            return Err(Error::NTruncationExceeded { n_max: self.n_max, tail });
        }
        let mut acc = 0.0;
        let cdf = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Ok(BridgeFrom { sampler: self, start: x, cdf })
    }

    pub fn sample<R: Rng + ?Sized>(&self, x: usize, rng: &mut R) -> Result<JumpPath> {
        Ok(self.from_start(x)?.sample(rng))
    }
}

/// A [`BridgeSampler`] bound to a start vertex.
#[derive(Clone, Debug)]
pub struct BridgeFrom<'a> {
    sampler: &'a BridgeSampler,
    start: usize,
    cdf: Vec<f64>,
}

impl BridgeFrom<'_> {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> JumpPath {
        let s = self.sampler;
        let u = rng.gen::<f64>() * self.cdf.last().copied().unwrap_or(1.0);
        let n = self.cdf.partition_point(|&c| c <= u).min(s.n_max);
        let mut times: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * s.t).collect();
        times.sort_by(f64::total_cmp);
        let mut jumps = Vec::new();
        let mut z = self.start;
        for (k, &time) in times.iter().enumerate() {
            let ahead = &s.to_target[n - k - 1];
            let next = categorical(rng, s.rows[z].iter().map(|&(j, p)| (j, p * ahead[j])));
            if next != z && time > 0.0 {
                jumps.push((time, next));
            }
            z = next;
        }
        debug_assert_eq!(z, s.target);
        JumpPath {
            start: self.start,
            jumps,
            horizon: s.t,
            exploded: false,
        }
    }
}

/// One bridge from `x` to `y` over `[0, t]`.
pub fn sample_bridge<R: Rng + ?Sized>(graph: &WeightedGraph, x: usize, y: usize, t: f64, rng: &mut R) -> Result<JumpPath> {
    BridgeSampler::new(graph, y, t)?.sample(x, rng)
}

/// Σ_x μ(x) p(t,x,x) E^{x,x}[e^{−∫₀ᵗ w(γ(s)) ds}], stratified over the
/// diagonal vertex with `n_samples` bridges split evenly.
pub fn feynman_kac_trace_mc(
    graph: &WeightedGraph,
    w: &Potential,
    t: f64,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    w.check(graph)?;
    let n = graph.len();
    if n_samples < n.max(2) {
        return Err(Error::Config(format!("need at least {} samples", n.max(2))));
    }
    let mut mean = 0.0;
    let mut var = 0.0;
    for x in 0..n {
        let per = n_samples / n + usize::from(x < n_samples % n);
        let sampler = BridgeSampler::new(graph, x, t)?;
        let weight = graph.mu()[x] * sampler.kernel(x);
        let bridge = sampler.from_start(x)?;
        let m = sample_moments(per, seed, x as u64, |rng| Ok((-bridge.sample(rng).integral(w.values())).exp()))?;
        mean += weight * m.mean;
        var += weight * weight * m.variance() / per as f64;
    }
    Ok(McEstimate {
        mean,
        std_error: var.sqrt(),
        n_samples,
        seed,
    })
}

/// Bridge estimate of P^{x,x}_t{γ(s) ∈ K for all s ∈ [0,t)}.
pub fn pnfb_probability(
    graph: &WeightedGraph,
    x: usize,
    region: &[usize],
    t: f64,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    graph.weighted_degree(x)?;
    if !region.contains(&x) {
        return Err(Error::VertexNotInK(x));
    }
    let mut inside = vec![false; graph.len()];
    for &v in region {
        graph.weighted_degree(v)?;
        inside[v] = true;
    }
    let sampler = BridgeSampler::new(graph, x, t)?;
    let bridge = sampler.from_start(x)?;
    estimate(n_samples, seed, |rng| Ok(f64::from(u8::from(bridge.sample(rng).stays_in(&inside)))))
}

/// e^{−t Deg(x)} / (p(t,x,x) μ(x)): the bridge probability of no jump
/// before `t`, which bounds the staying probability for any K ∋ x.
pub fn no_jump_lower_bound(graph: &WeightedGraph, x: usize, t: f64) -> Result<f64> {
    let deg = graph.weighted_degree(x)?;
    let p = BridgeSampler::new(graph, x, t)?.kernel(x);
    Ok((-t * deg).exp() / (p * graph.mu()[x]))
}

/// Empirical law of γ(s) under the free process from `x`, one estimate per
/// vertex.
pub fn free_marginal_mc(graph: &WeightedGraph, x: usize, s: f64, n_samples: usize, seed: u64) -> Result<Vec<McEstimate>> {
    (0..graph.len())
        .map(|y| {
            estimate(n_samples, seed, |rng| {
                Ok(f64::from(u8::from(sample_free_path(graph, x, s, rng)?.state_at(s) == y)))
            })
        })
        .collect()
}

/// E^x[F(γ)] under the free process.
pub fn free_functional_mc<F>(graph: &WeightedGraph, x: usize, t: f64, n_samples: usize, seed: u64, f: F) -> Result<McEstimate>
where
    F: Fn(&JumpPath) -> f64 + Sync,
{
    estimate(n_samples, seed, |rng| Ok(f(&sample_free_path(graph, x, t, rng)?)))
}

/// E^{x,y}[F(γ)] under the bridge law.
pub fn bridge_functional_mc<F>(
    graph: &WeightedGraph,
    x: usize,
    y: usize,
    t: f64,
    n_samples: usize,
    seed: u64,
    f: F,
) -> Result<McEstimate>
where
    F: Fn(&JumpPath) -> f64 + Sync,
{
    let sampler = BridgeSampler::new(graph, y, t)?;
    let bridge = sampler.from_start(x)?;
    estimate(n_samples, seed, |rng| Ok(f(&bridge.sample(rng))))
}
