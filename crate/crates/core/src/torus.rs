//! Flat tori `R^m / (L_1 Z × … × L_m Z)` for `m ∈ {1, 2}` in the Fourier
//! basis `e_k(x) = e^{i 2π k·x / L} / √vol`, truncated to `|k_i| ≤ N`.
//!
//! `−Δ` is diagonal with eigenvalues `Σ_i (2π k_i / L_i)²`, and a potential
//! acts through its Fourier coefficients `ŵ(q) = vol⁻¹ ∫ w e^{−i 2π q·x/L}`,
//! giving the Galerkin matrix `λ_k δ_{kk'} + ŵ(k − k')`.

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::schrodinger::{ConvergenceReport, ScanTolerance};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

/// Relative change allowed between truncations `N` and `2N`.
pub const TRUNCATION_TOLERANCE: f64 = 1e-6;

/// Trapezoid points per axis for the classical integral.
pub const TARGET_POINTS_1D: usize = 4096;
pub const TARGET_POINTS_2D: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub k: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Pointwise potential on the torus, `x` in `[0, L_i)` per axis.
pub type PotentialFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum TorusPotential {
    Zero,
    Constant(f64),
    /// `Σ_i (1 − cos(2π x_i / L_i))`
    CosineWell,
    Coefficients(Vec<FourierTerm>),
    Evaluator(PotentialFn),
}

impl fmt::Debug for TorusPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::CosineWell => write!(f, "CosineWell"),
            Self::Coefficients(c) => f.debug_tuple("Coefficients").field(c).finish(),
            Self::Evaluator(_) => write!(f, "Evaluator(..)"),
        }
    }
}

#[derive(Deserialize)]
struct CoefficientFile {
    coefficients: Vec<FourierTerm>,
}

impl TorusPotential {
    /// `"zero"`, `"constant:<c>"`, `"cosine-well"`, or a path (relative to
    /// `base`) to a JSON file `{"coefficients": [{"k": [..], "re": .., "im": ..}]}`.
    pub fn from_spec(spec: &str, base: &Path) -> Result<Self> {
        let spec = spec.trim();
        if spec == "zero" {
            return Ok(Self::Zero);
        }
        if spec == "cosine-well" {
            return Ok(Self::CosineWell);
        }
        if let Some(c) = spec.strip_prefix("constant:") {
            let c: f64 = c
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad constant potential `{spec}`")))?;
            return Ok(Self::Constant(c));
        }
        let path = base.join(spec);
        let src = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let file: CoefficientFile = serde_json::from_str(&src)?;
        Ok(Self::Coefficients(file.coefficients))
    }
}

/// Normalisation of the scaled trace: `(4πt)^{m/2}` matches the semigroup
/// `e^{tΔ}`, `(2πt)^{m/2}` matches `e^{tΔ/2}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceScaling {
    #[default]
    #[serde(rename = "4pi")]
    FourPi,
    #[serde(rename = "2pi")]
    TwoPi,
}

impl TraceScaling {
    fn constant(self) -> f64 {
        match self {
            Self::FourPi => 4.0 * PI,
            Self::TwoPi => 2.0 * PI,
        }
    }
}

/// Dense table of `ŵ(q)` for `q ∈ [−span, span]^m`.
#[derive(Clone, Debug)]
struct CoefficientTable {
    dim: usize,
    span: i64,
    values: Vec<Complex64>,
}

impl CoefficientTable {
    fn side(&self) -> usize {
        (2 * self.span + 1) as usize
    }

    fn get(&self, q: &[i64]) -> Complex64 {
        if q.iter().any(|qi| qi.abs() > self.span) {
            return Complex64::new(0.0, 0.0);
        }
        let mut idx = 0;
        for &qi in q {
            idx = idx * self.side() + (qi + self.span) as usize;
        }
        self.values[idx]
    }

    fn set(&mut self, q: &[i64], v: Complex64) {
        let mut idx = 0;
        for &qi in q {
            idx = idx * self.side() + (qi + self.span) as usize;
        }
        self.values[idx] = v;
    }
}

#[derive(Clone, Debug)]
pub struct TorusModel {
    lengths: Vec<f64>,
    truncation: usize,
    potential: TorusPotential,
    pub scaling: TraceScaling,
}

impl TorusModel {
    pub fn new(lengths: Vec<f64>, truncation: usize, potential: TorusPotential) -> Result<Self> {
        if !(1..=2).contains(&lengths.len()) {
            return Err(Error::InvalidModel(format!("dimension {} not in {{1, 2}}", lengths.len())));
        }
        if let Some(l) = lengths.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidModel(format!("side length {l}")));
        }
        if truncation == 0 {
            return Err(Error::InvalidModel("truncation must be at least 1".into()));
        }
        if let TorusPotential::Constant(c) = potential {
            if !c.is_finite() {
                return Err(Error::InvalidModel(format!("constant potential {c}")));
            }
        }
        if let TorusPotential::Coefficients(terms) = &potential {
            check_coefficients(terms, lengths.len())?;
        }
        Ok(Self {
            lengths,
            truncation,
            potential,
            scaling: TraceScaling::default(),
        })
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn potential(&self) -> &TorusPotential {
        &self.potential
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    pub fn with_truncation(&self, truncation: usize) -> Result<Self> {
        let mut m = Self::new(self.lengths.clone(), truncation, self.potential.clone())?;
        m.scaling = self.scaling;
        Ok(m)
    }

    pub fn with_potential(&self, potential: TorusPotential) -> Result<Self> {
        let mut m = Self::new(self.lengths.clone(), self.truncation, potential)?;
        m.scaling = self.scaling;
        Ok(m)
    }

    /// Multi-indices of the truncated basis, lexicographic.
    pub fn modes(&self) -> Vec<Vec<i64>> {
        let n = self.truncation as i64;
        let axis: Vec<i64> = (-n..=n).collect();
        match self.dim() {
            1 => axis.iter().map(|&k| vec![k]).collect(),
            _ => axis.iter().flat_map(|&a| axis.iter().map(move |&b| vec![a, b])).collect(),
        }
    }

    pub fn laplace_eigenvalue(&self, k: &[i64]) -> f64 {
        k.iter().zip(&self.lengths).map(|(&ki, l)| (2.0 * PI * ki as f64 / l).powi(2)).sum()
    }

    /// w(x) for `x` in the fundamental cell.
    pub fn potential_at(&self, x: &[f64]) -> f64 {
        match &self.potential {
            TorusPotential::Zero => 0.0,
            TorusPotential::Constant(c) => *c,
            TorusPotential::CosineWell => x
                .iter()
                .zip(&self.lengths)
                .map(|(xi, l)| 1.0 - (2.0 * PI * xi / l).cos())
                .sum(),
            TorusPotential::Coefficients(terms) => terms
                .iter()
                .map(|term| {
                    let phase: f64 = term
                        .k
                        .iter()
                        .zip(x.iter().zip(&self.lengths))
                        .map(|(&k, (xi, l))| 2.0 * PI * k as f64 * xi / l)
                        .sum();
                    (Complex64::new(term.re, term.im) * Complex64::from_polar(1.0, phase)).re
                })
                .sum(),
            TorusPotential::Evaluator(f) => f(x),
        }
    }

    fn coefficient_table(&self, span: i64) -> CoefficientTable {
        let m = self.dim();
        let side = (2 * span + 1) as usize;
        let mut table = CoefficientTable {
            dim: m,
            span,
            values: vec![Complex64::new(0.0, 0.0); side.pow(m as u32)],
        };
        let zero = vec![0i64; m];
        match &self.potential {
            TorusPotential::Zero => {}
            TorusPotential::Constant(c) => table.set(&zero, Complex64::new(*c, 0.0)),
            TorusPotential::CosineWell => {
                table.set(&zero, Complex64::new(m as f64, 0.0));
                for axis in 0..m {
                    for s in [-1, 1] {
                        let mut q = zero.clone();
                        q[axis] = s;
                        table.set(&q, Complex64::new(-0.5, 0.0));
                    }
                }
            }
            TorusPotential::Coefficients(terms) => {
                for term in terms.iter().filter(|t| t.k.iter().all(|k| k.abs() <= span)) {
                    let v = table.get(&term.k) + Complex64::new(term.re, term.im);
                    table.set(&term.k, v);
                }
            }
            TorusPotential::Evaluator(_) => self.sampled_coefficients(&mut table),
        }
        table
    }

    /// Discrete Fourier coefficients from `2·span + 1` samples per axis,
    /// exact for trigonometric polynomials of degree ≤ span.
    fn sampled_coefficients(&self, table: &mut CoefficientTable) {
        let span = table.span;
        let p = table.side();
        let twiddle = |q: i64, j: usize| Complex64::from_polar(1.0, -2.0 * PI * (q * j as i64) as f64 / p as f64);
        let h: Vec<f64> = self.lengths.iter().map(|l| l / p as f64).collect();
        match table.dim {
            1 => {
                let samples: Vec<f64> = (0..p).map(|j| self.potential_at(&[j as f64 * h[0]])).collect();
                for q in -span..=span {
                    let s: Complex64 = samples.iter().enumerate().map(|(j, v)| twiddle(q, j) * v).sum();
                    table.set(&[q], s / p as f64);
                }
            }
            _ => {
                let samples: Vec<f64> = (0..p * p)
                    .map(|ij| self.potential_at(&[(ij / p) as f64 * h[0], (ij % p) as f64 * h[1]]))
                    .collect();
                // Transform along the second axis, then the first.
                let mut partial = vec![Complex64::new(0.0, 0.0); p * p];
                for i in 0..p {
                    for (qb, slot) in (-span..=span).zip(partial[i * p..(i + 1) * p].iter_mut()) {
                        *slot = (0..p).map(|j| twiddle(qb, j) * samples[i * p + j]).sum();
                    }
                }
                for qa in -span..=span {
                    for (b, qb) in (-span..=span).enumerate() {
                        let s: Complex64 = (0..p).map(|i| twiddle(qa, i) * partial[i * p + b]).sum();
                        table.set(&[qa, qb], s / (p * p) as f64);
                    }
                }
            }
        }
    }
}

fn check_coefficients(terms: &[FourierTerm], dim: usize) -> Result<()> {
    for term in terms {
        if term.k.len() != dim {
            return Err(Error::InvalidModel(format!("coefficient index {:?} in dimension {dim}", term.k)));
        }
        if !(term.re.is_finite() && term.im.is_finite()) {
            return Err(Error::InvalidModel(format!("coefficient at {:?} not finite", term.k)));
        }
    }
    let sum_at = |k: &[i64]| -> Complex64 {
        terms
            .iter()
            .filter(|t| t.k == k)
            .map(|t| Complex64::new(t.re, t.im))
            .sum()
    };
    for term in terms {
        let neg: Vec<i64> = term.k.iter().map(|k| -k).collect();
        let (a, b) = (sum_at(&term.k), sum_at(&neg));
        if (a - b.conj()).norm() > 1e-12 * a.norm().max(1.0) {
            return Err(Error::InvalidModel(format!(
                "coefficients at {:?} and {neg:?} are not conjugate; potential would be complex",
                term.k
            )));
        }
    }
    Ok(())
}

/// Sorted spectrum of `−Δ` on the truncated basis.
pub fn torus_eigenvalues(model: &TorusModel) -> Vec<f64> {
    let mut ev: Vec<f64> = model.modes().iter().map(|k| model.laplace_eigenvalue(k)).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn theta_sum(t: f64, length: f64, cap: Option<usize>) -> f64 {
    let mut sum = 1.0;
    let mut k = 1usize;
    loop {
        if cap.is_some_and(|c| k > c) {
            break;
        }
        let term = 2.0 * (-t * (2.0 * PI * k as f64 / length).powi(2)).exp();
        sum += term;
        if term < 1e-16 * sum {
            break;
        }
        k += 1;
    }
    sum
}

/// `tr e^{tΔ}` on the full torus (no truncation), `w ≡ 0`.
pub fn exact_heat_trace(model: &TorusModel, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(model.lengths.iter().map(|&l| theta_sum(t, l, None)).product())
}

/// `Σ_{|k_i| ≤ N} e^{−t λ_k}`
pub fn truncated_heat_trace(model: &TorusModel, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(model
        .lengths
        .iter()
        .map(|&l| theta_sum(t, l, Some(model.truncation)))
        .product())
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonpositiveTime(t))
    }
}

/// Row-major entries of `t·(−Δ) + w` on the truncated basis, i.e. `t` times
/// the Galerkin matrix of `−Δ + w/t`.
pub fn galerkin_matrix(model: &TorusModel, t: f64) -> Result<Vec<Complex64>> {
    check_time(t)?;
    let modes = model.modes();
    let n = modes.len();
    let table = model.coefficient_table(2 * model.truncation as i64);
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    let mut diff = vec![0i64; model.dim()];
    for (i, ki) in modes.iter().enumerate() {
        for (j, kj) in modes.iter().enumerate() {
            for (d, (x, y)) in diff.iter_mut().zip(ki.iter().zip(kj)) {
                *d = x - y;
            }
            a[i * n + j] = table.get(&diff);
        }
        a[i * n + i] += t * model.laplace_eigenvalue(ki);
    }
    Ok(a)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GalerkinOptions {
    /// Recompute at `2N` and fail if the trace moves by more than
    /// `tolerance` relative.
    pub check_truncation: bool,
    pub tolerance: f64,
}

impl Default for GalerkinOptions {
    fn default() -> Self {
        Self {
            check_truncation: true,
            tolerance: TRUNCATION_TOLERANCE,
        }
    }
}

fn raw_trace(model: &TorusModel, t: f64) -> Result<f64> {
    let a = galerkin_matrix(model, t)?;
    let n = model.modes().len();
    Ok(hermitian_eigenvalues(n, &a)?.iter().map(|e| (-e).exp()).sum())
}

/// `tr e^{−t(−Δ + w/t)}` on the truncated basis.
pub fn galerkin_schrodinger_trace(model: &TorusModel, t: f64) -> Result<f64> {
    galerkin_trace_with(model, t, GalerkinOptions::default())
}

pub fn galerkin_trace_with(model: &TorusModel, t: f64, opts: GalerkinOptions) -> Result<f64> {
    let trace = raw_trace(model, t)?;
    if opts.check_truncation {
        let fine = raw_trace(&model.with_truncation(2 * model.truncation)?, t)?;
        let rel = (fine - trace).abs() / fine.abs();
        if rel > opts.tolerance {
            return Err(Error::TruncationNotConverged(rel));
        }
    }
    Ok(trace)
}

/// Trapezoid value of `∫ e^{−w} dx` over the cell.
pub fn quadrature_target(model: &TorusModel) -> f64 {
    match model.dim() {
        1 => {
            let n = TARGET_POINTS_1D;
            let h = model.lengths[0] / n as f64;
            (0..n).map(|j| (-model.potential_at(&[j as f64 * h])).exp()).sum::<f64>() * h
        }
        _ => {
            let n = TARGET_POINTS_2D;
            let (ha, hb) = (model.lengths[0] / n as f64, model.lengths[1] / n as f64);
            (0..n)
                .into_par_iter()
                .map(|i| {
                    (0..n)
                        .map(|j| (-model.potential_at(&[i as f64 * ha, j as f64 * hb])).exp())
                        .sum::<f64>()
                })
                .collect::<Vec<_>>()
                .iter()
                .sum::<f64>()
                * ha
                * hb
        }
    }
}

/// `(c t)^{m/2}` with `c` from the model's scaling.
pub fn trace_scale(model: &TorusModel, t: f64) -> f64 {
    (model.scaling.constant() * t).powf(model.dim() as f64 / 2.0)
}

/// Limit of the scaled trace: `∫ e^{−w}` times the constant that the
/// scaling convention leaves over.
pub fn scan_target(model: &TorusModel) -> f64 {
    let offset = (model.scaling.constant() / (4.0 * PI)).powf(model.dim() as f64 / 2.0);
    quadrature_target(model) * offset
}

/// Scaled Galerkin traces along `t_grid` against the classical integral.
/// The bound column is the scaled `∫ p(t,x,x) e^{−w} dx` with the exact
/// (untruncated) diagonal `p(t,x,x) = tr e^{tΔ} / vol`.
pub fn torus_semiclassical_scan(
    model: &TorusModel,
    t_grid: &[f64],
    opts: GalerkinOptions,
    tol: ScanTolerance,
) -> Result<ConvergenceReport> {
    if t_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let integral = quadrature_target(model);
    let rows = t_grid
        .par_iter()
        .map(|&t| {
            let scale = trace_scale(model, t);
            let trace = galerkin_trace_with(model, t, opts)?;
            let gt = scale * exact_heat_trace(model, t)? / model.volume() * integral;
            Ok((scale * trace, gt))
        })
        .collect::<Result<Vec<_>>>()?;
    let (scaled, gt): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    Ok(ConvergenceReport::assemble(t_grid.to_vec(), scaled, scan_target(model), gt, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TAU: f64 = 2.0 * PI;

    fn circle(n: usize, w: TorusPotential) -> TorusModel {
        TorusModel::new(vec![TAU], n, w).unwrap()
    }

    /// e^{−1}·2π·I_0(1) by the power series of I_0.
    fn cosine_well_integral() -> f64 {
        let mut i0 = 0.0;
        let mut term = 1.0;
        for j in 0..30 {
            if j > 0 {
                term *= 0.25 / (j * j) as f64;
            }
            i0 += term;
        }
        TAU * (-1.0f64).exp() * i0
    }

    #[test]
    fn spectra_of_small_truncations() {
        assert_eq!(torus_eigenvalues(&circle(2, TorusPotential::Zero)), vec![0.0, 1.0, 1.0, 4.0, 4.0]);
        let sq = TorusModel::new(vec![TAU, TAU], 1, TorusPotential::Zero).unwrap();
        let ev = torus_eigenvalues(&sq);
        let want = [0.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0];
        assert!(ev.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12));
        let short = TorusModel::new(vec![PI], 1, TorusPotential::Zero).unwrap();
        let ev = torus_eigenvalues(&short);
        assert!((ev[0]).abs() < 1e-15 && (ev[1] - 4.0).abs() < 1e-12 && (ev[2] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn exact_heat_trace_values() {
        let m = circle(4, TorusPotential::Zero);
        let direct: f64 = (-8i32..=8).map(|k| (-(k * k) as f64).exp()).sum();
        assert!((exact_heat_trace(&m, 1.0).unwrap() - direct).abs() < 1e-15);
        assert!((direct - 1.7726372).abs() < 1e-6);
        assert!((exact_heat_trace(&m, 50.0).unwrap() - 1.0).abs() < 1e-20);
        let t = 1e-4;
        let scaled = (4.0 * PI * t).sqrt() * exact_heat_trace(&m, t).unwrap();
        assert!((scaled - TAU).abs() < 1e-10);
        assert!(exact_heat_trace(&m, 0.0).is_err());
    }

    #[test]
    fn zero_potential_matches_truncated_trace() {
        let m = circle(16, TorusPotential::Zero);
        for t in [0.01, 0.1, 1.0] {
            let g = galerkin_trace_with(&m, t, GalerkinOptions { check_truncation: false, ..Default::default() }).unwrap();
            assert!((g - truncated_heat_trace(&m, t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_potential_factorises() {
        let m = circle(32, TorusPotential::Constant(0.7));
        let z = circle(32, TorusPotential::Zero);
        let t = 0.05;
        let a = galerkin_schrodinger_trace(&m, t).unwrap();
        let b = galerkin_schrodinger_trace(&z, t).unwrap();
        assert!((a - (-0.7f64).exp() * b).abs() < 1e-13 * b);
    }

    #[test]
    fn matrix_is_hermitian() {
        let terms = vec![
            FourierTerm { k: vec![1], re: 0.2, im: 0.3 },
            FourierTerm { k: vec![-1], re: 0.2, im: -0.3 },
            FourierTerm { k: vec![0], re: 1.0, im: 0.0 },
        ];
        let m = circle(6, TorusPotential::Coefficients(terms));
        let a = galerkin_matrix(&m, 0.3).unwrap();
        let n = 13;
        for i in 0..n {
            for j in 0..n {
                assert_eq!(a[i * n + j], a[j * n + i].conj());
            }
        }
        let bad = vec![FourierTerm { k: vec![1], re: 0.2, im: 0.3 }];
        assert!(matches!(TorusModel::new(vec![TAU], 4, TorusPotential::Coefficients(bad)), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn evaluator_and_coefficients_agree() {
        let by_eval = circle(12, TorusPotential::Evaluator(Arc::new(|x: &[f64]| 1.0 - x[0].cos() + 0.3 * (2.0 * x[0]).sin())));
        let terms = vec![
            FourierTerm { k: vec![0], re: 1.0, im: 0.0 },
            FourierTerm { k: vec![1], re: -0.5, im: 0.0 },
            FourierTerm { k: vec![-1], re: -0.5, im: 0.0 },
            FourierTerm { k: vec![2], re: 0.0, im: -0.15 },
            FourierTerm { k: vec![-2], re: 0.0, im: 0.15 },
        ];
        let by_coef = circle(12, TorusPotential::Coefficients(terms));
        let (a, b) = (galerkin_matrix(&by_eval, 0.2).unwrap(), galerkin_matrix(&by_coef, 0.2).unwrap());
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-13));
        assert!((by_eval.potential_at(&[0.4]) - by_coef.potential_at(&[0.4])).abs() < 1e-14);
    }

    #[test]
    fn sampled_coefficients_in_two_dimensions() {
        let eval = TorusModel::new(
            vec![TAU, TAU],
            2,
            TorusPotential::Evaluator(Arc::new(|x: &[f64]| 2.0 - x[0].cos() - x[1].cos())),
        )
        .unwrap();
        let well = TorusModel::new(vec![TAU, TAU], 2, TorusPotential::CosineWell).unwrap();
        let (a, b) = (galerkin_matrix(&eval, 0.5).unwrap(), galerkin_matrix(&well, 0.5).unwrap());
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-13));
    }

    #[test]
    fn quadrature_targets() {
        assert!((quadrature_target(&circle(4, TorusPotential::Zero)) - TAU).abs() < 1e-12);
        let half = quadrature_target(&circle(4, TorusPotential::Constant(2f64.ln())));
        assert!((half - PI).abs() < 1e-12);
        let well = quadrature_target(&circle(4, TorusPotential::CosineWell));
        assert!((well - cosine_well_integral()).abs() < 1e-12);
        assert!((well - 2.926454).abs() < 1e-6);
        let sq = TorusModel::new(vec![TAU, TAU], 2, TorusPotential::Zero).unwrap();
        assert!((quadrature_target(&sq) - TAU * TAU).abs() < 1e-9);
    }

    #[test]
    fn truncation_diagnostic_trips() {
        let m = circle(4, TorusPotential::CosineWell);
        assert!(matches!(galerkin_schrodinger_trace(&m, 0.01), Err(Error::TruncationNotConverged(_))));
        let fine = circle(48, TorusPotential::CosineWell);
        assert!(galerkin_schrodinger_trace(&fine, 0.1).is_ok());
    }

    #[test]
    fn cosine_well_scan_approaches_integral() {
        let m = circle(64, TorusPotential::CosineWell);
        let grid = [0.1, 0.05, 0.02, 0.01, 0.005];
        let report = torus_semiclassical_scan(
            &m,
            &grid,
            GalerkinOptions { check_truncation: false, ..Default::default() },
            ScanTolerance::default(),
        )
        .unwrap();
        assert!((report.target - cosine_well_integral()).abs() < 1e-12);
        assert!(report.verdict.relative_final_error < 0.01);
        assert!(report.abs_errors.windows(2).all(|w| w[1] <= w[0]));
        assert!(report.verdict.gt_respected);
    }

    #[test]
    fn constant_shift_scan() {
        let m = circle(64, TorusPotential::Constant(2f64.ln()));
        let report = torus_semiclassical_scan(&m, &[0.1, 0.01], GalerkinOptions::default(), ScanTolerance::default()).unwrap();
        assert!((report.target - PI).abs() < 1e-12);
        assert!(report.verdict.relative_final_error < 1e-9);
    }

    #[test]
    fn two_pi_scaling_shifts_target() {
        let mut m = circle(64, TorusPotential::Zero);
        m.scaling = TraceScaling::TwoPi;
        assert!((scan_target(&m) - TAU / 2f64.sqrt()).abs() < 1e-12);
        let r = torus_semiclassical_scan(&m, &[0.01], GalerkinOptions::default(), ScanTolerance::default()).unwrap();
        assert!(r.verdict.relative_final_error < 1e-9);
    }

    #[test]
    fn potential_specs() {
        let base = Path::new(".");
        assert!(matches!(TorusPotential::from_spec("zero", base), Ok(TorusPotential::Zero)));
        assert!(matches!(TorusPotential::from_spec("constant:1.5", base), Ok(TorusPotential::Constant(c)) if c == 1.5));
        assert!(matches!(TorusPotential::from_spec("cosine-well", base), Ok(TorusPotential::CosineWell)));
        assert!(matches!(TorusPotential::from_spec("constant:x", base), Err(Error::Config(_))));
        assert!(matches!(TorusPotential::from_spec("missing.json", base), Err(Error::Io { .. })));
    }

    #[test]
    fn invalid_models() {
        assert!(TorusModel::new(vec![], 4, TorusPotential::Zero).is_err());
        assert!(TorusModel::new(vec![1.0, 1.0, 1.0], 4, TorusPotential::Zero).is_err());
        assert!(TorusModel::new(vec![-1.0], 4, TorusPotential::Zero).is_err());
        assert!(TorusModel::new(vec![1.0], 0, TorusPotential::Zero).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn constant_factorisation_holds(c in -2.0f64..3.0, t in 0.01f64..2.0, n in 2usize..20) {
            let z = galerkin_trace_with(&circle(n, TorusPotential::Zero), t, GalerkinOptions { check_truncation: false, ..Default::default() }).unwrap();
            let w = galerkin_trace_with(&circle(n, TorusPotential::Constant(c)), t, GalerkinOptions { check_truncation: false, ..Default::default() }).unwrap();
            prop_assert!((w - (-c).exp() * z).abs() <= 1e-13 * w.abs().max(1.0));
        }

        #[test]
        fn trace_below_bound(depth in 0.0f64..2.0, t in 0.02f64..1.0) {
            let terms = vec![
                FourierTerm { k: vec![0], re: depth, im: 0.0 },
                FourierTerm { k: vec![1], re: -depth / 2.0, im: 0.0 },
                FourierTerm { k: vec![-1], re: -depth / 2.0, im: 0.0 },
            ];
            let m = circle(24, TorusPotential::Coefficients(terms));
            let opts = GalerkinOptions { check_truncation: false, ..Default::default() };
            let r = torus_semiclassical_scan(&m, &[t], opts, ScanTolerance::default()).unwrap();
            prop_assert!(r.verdict.gt_respected);
        }
    }
}
