//! Diagnostics for potential classes: the Kato modulus, form-bound
//! witnesses on finite graphs, and the growth-series admissibility test for
//! manifolds with Ricci curvature bounded below.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::heat_kernel::{kernel_table, KernelOptions};
use crate::linalg::{symmetric_eigenvalues, GaussLegendre};
use crate::schrodinger::Potential;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

pub const KATO_QUADRATURE_ORDER: usize = 32;

/// Tail bound a geometric certificate must beat.
pub const GEOMETRIC_TAIL_TOLERANCE: f64 = 1e-9;

/// Smallest local decay exponent accepted by the power-law certificate.
pub const POWER_LAW_MIN_EXPONENT: f64 = 1.05;

/// `sup_x ∫₀ᵗ Σ_y p(s,x,y) |w(y)| μ(y) ds` by Gauss–Legendre in `s`.
pub fn kato_modulus(graph: &WeightedGraph, w: &Potential, t: f64) -> Result<f64> {
    w.check(graph)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonpositiveTime(t));
    }
    let abs_w: Vec<f64> = w.values().iter().map(|v| v.abs()).collect();
    if abs_w.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let weighted: Vec<f64> = abs_w.iter().zip(graph.mu()).map(|(a, m)| a * m).collect();
    let rule = GaussLegendre::new(KATO_QUADRATURE_ORDER);
    let mut per_vertex = vec![0.0; graph.len()];
    for (s, h) in rule.mapped(0.0, t) {
        let k = kernel_table(graph, s, KernelOptions::default());
        for (x, acc) in per_vertex.iter_mut().enumerate() {
            let row: f64 = (0..graph.len()).map(|y| k.get(x, y) * weighted[y]).sum();
            *acc += h * row;
        }
    }
    Ok(per_vertex.into_iter().fold(0.0, f64::max))
}

/// Smallest `C` with `⟨|w| f, f⟩ ≤ ε Q(f, f) + C ⟨f, f⟩` for all `f`, as the
/// top eigenvalue of `diag|w| − ε S` with `S` the symmetrised generator.
pub fn infinitesimal_class_witness(graph: &WeightedGraph, w: &Potential, epsilon: f64) -> Result<f64> {
    w.check(graph)?;
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::Config(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    let mut pencil = graph.symmetric_generator();
    pencil.scale(-epsilon);
    for (x, v) in w.values().iter().enumerate() {
        pencil[(x, x)] += v.abs();
    }
    let top = symmetric_eigenvalues(&pencil)?.last().copied().unwrap_or(0.0);
    Ok(top.max(0.0))
}

/// `k ↦ c_k` for `k ≥ 2`, evaluated in log form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum CoefficientRule {
    /// `c_k = value`
    Constant { value: f64 },
    /// `c_k = k^{−exponent}`
    Power { exponent: f64 },
    /// `c_k = e^{−rate·k}`
    Exponential { rate: f64 },
    /// `c_k = e^{−scale·(k − shift)²}`; `shift = 1` is the profile of a
    /// potential growing like `scale·d²`.
    Gaussian { scale: f64, shift: f64 },
    /// `c_2, c_3, …`; must cover `k_max`.
    Table { values: Vec<f64> },
}

impl CoefficientRule {
    pub fn log_value(&self, k: usize) -> Result<f64> {
        let kf = k as f64;
        let v = match self {
            Self::Constant { value } => value.ln(),
            Self::Power { exponent } => -exponent * kf.ln(),
            Self::Exponential { rate } => -rate * kf,
            Self::Gaussian { scale, shift } => -scale * (kf - shift).powi(2),
            Self::Table { values } => values
                .get(k.wrapping_sub(2))
                .ok_or_else(|| Error::Config(format!("coefficient table has no entry for k = {k}")))?
                .ln(),
        };
        if !v.is_finite() {
            return Err(Error::Config(format!("coefficient at k = {k} is not a positive finite number")));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthProfile {
    #[serde(rename = "m")]
    pub dim: usize,
    /// Lower Ricci bound `−A`, `A ≥ 0`.
    #[serde(rename = "A")]
    pub ricci_bound: f64,
    pub k_max: usize,
    pub c_k: CoefficientRule,
}

impl GrowthProfile {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        if !(self.ricci_bound >= 0.0 && self.ricci_bound.is_finite()) {
            return Err(Error::Config(format!("curvature constant {} must be nonnegative", self.ricci_bound)));
        }
        if self.k_max < 2 + MIN_WINDOW {
            return Err(Error::Config(format!("k_max must be at least {}", 2 + MIN_WINDOW)));
        }
        Ok(())
    }

    /// `√((m−1)A)`
    pub fn volume_growth_rate(&self) -> f64 {
        ((self.dim as f64 - 1.0) * self.ricci_bound).sqrt()
    }

    pub fn with_k_max(&self, k_max: usize) -> Self {
        Self { k_max, ..self.clone() }
    }
}

pub fn load_profile(path: impl AsRef<Path>) -> Result<GrowthProfile> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let p: GrowthProfile = serde_json::from_str(&src)?;
    p.validate()?;
    Ok(p)
}

/// Which series to test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SeriesForm {
    /// `c_k k^m e^{2k√((m−1)A)}`
    Ricci,
    /// `c_k (2k)^m e^{2Lk}`
    Doubling { rate: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Admissibility {
    Admissible,
    Inadmissible,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// Term ratios stay below `ratio` over the window.
    Geometric { ratio: f64, tail_bound: f64 },
    /// Terms decay at least like `k^{−exponent}` over the window.
    PowerLaw { exponent: f64, tail_bound: f64 },
    /// Terms never decrease over the window.
    NonDecreasing { floor: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesRow {
    pub k: usize,
    pub log_term: f64,
    pub term: f64,
    pub partial_sum: f64,
    pub log_partial_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub verdict: Admissibility,
    pub certificate: Option<Certificate>,
    pub window: usize,
    pub rows: Vec<SeriesRow>,
}

impl AdmissibilityReport {
    pub fn partial_sum(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.partial_sum)
    }

    /// Columns: k, term, log_term, partial_sum.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,term,log_term,partial_sum\n");
        for r in &self.rows {
            writeln!(out, "{},{:e},{:e},{:e}", r.k, r.term, r.log_term, r.partial_sum).unwrap();
        }
        out
    }
}

const MIN_WINDOW: usize = 5;
const MAX_WINDOW: usize = 50;

fn window_len(terms: usize) -> usize {
    (terms / 5).clamp(MIN_WINDOW, MAX_WINDOW).min(terms - 1)
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

pub fn ricci_admissibility(profile: &GrowthProfile) -> Result<AdmissibilityReport> {
    admissibility_with(profile, SeriesForm::Ricci)
}

/// The doubling form with the profile's own `√((m−1)A)` as rate.
pub fn doubling_admissibility(profile: &GrowthProfile) -> Result<AdmissibilityReport> {
    admissibility_with(profile, SeriesForm::Doubling { rate: profile.volume_growth_rate() })
}

pub fn admissibility_with(profile: &GrowthProfile, form: SeriesForm) -> Result<AdmissibilityReport> {
    profile.validate()?;
    let m = profile.dim as f64;
    let mut rows = Vec::with_capacity(profile.k_max - 1);
    let mut log_sum = f64::NEG_INFINITY;
    for k in 2..=profile.k_max {
        let kf = k as f64;
        let growth = match form {
            SeriesForm::Ricci => m * kf.ln() + 2.0 * kf * profile.volume_growth_rate(),
            SeriesForm::Doubling { rate } => m * (2.0 * kf).ln() + 2.0 * rate * kf,
        };
        let log_term = profile.c_k.log_value(k)? + growth;
        log_sum = log_add(log_sum, log_term);
        rows.push(SeriesRow {
            k,
            log_term,
            term: log_term.exp(),
            partial_sum: log_sum.exp(),
            log_partial_sum: log_sum,
        });
    }
    let window = window_len(rows.len());
    let (verdict, certificate) = classify(&rows[rows.len() - window - 1..]);
    Ok(AdmissibilityReport {
        verdict,
        certificate,
        window,
        rows,
    })
}

fn classify(tail: &[SeriesRow]) -> (Admissibility, Option<Certificate>) {
    let last = tail.last().expect("non-empty window");
    let log_ratios: Vec<f64> = tail.windows(2).map(|p| p[1].log_term - p[0].log_term).collect();

    let log_q = log_ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if log_q < 0.0 {
        let q = log_q.exp();
        // a_K q / (1 − q), in logs so vanishing terms stay representable.
        let log_tail = last.log_term + log_q - (-log_q.exp_m1()).ln();
        if log_tail < GEOMETRIC_TAIL_TOLERANCE.ln() {
            let tail_bound = log_tail.exp();
            return (Admissibility::Admissible, Some(Certificate::Geometric { ratio: q, tail_bound }));
        }
    }

    let exponent = tail
        .windows(2)
        .map(|p| -(p[1].log_term - p[0].log_term) / (1.0 / p[0].k as f64).ln_1p())
        .fold(f64::INFINITY, f64::min);
    if exponent >= POWER_LAW_MIN_EXPONENT {
        // Σ_{j>K} a_K (K/j)^s ≤ a_K K / (s − 1)
        let tail_bound = (last.log_term + (last.k as f64).ln() - (exponent - 1.0).ln()).exp();
        return (Admissibility::Admissible, Some(Certificate::PowerLaw { exponent, tail_bound }));
    }

    if log_ratios.iter().all(|&r| r >= 0.0) {
        let floor = tail[0].term;
        return (Admissibility::Inadmissible, Some(Certificate::NonDecreasing { floor }));
    }
    (Admissibility::Undecided, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families;
    use proptest::prelude::*;

    fn profile(dim: usize, a: f64, k_max: usize, c_k: CoefficientRule) -> GrowthProfile {
        GrowthProfile {
            dim,
            ricci_bound: a,
            k_max,
            c_k,
        }
    }

    #[test]
    fn kato_zero_and_bound() {
        let g = families::random_connected(6, 0.4, (0.2, 1.0), (0.5, 2.0), 3);
        assert_eq!(kato_modulus(&g, &Potential::zero(6), 1.0).unwrap(), 0.0);
        let w = Potential::new(vec![1.0, -2.0, 0.5, 0.0, 3.0, -0.1]).unwrap();
        for t in [0.01, 0.3, 2.0] {
            let k = kato_modulus(&g, &w, t).unwrap();
            assert!(k <= t * 3.0 * (1.0 + 1e-12));
            assert!(k > 0.0);
        }
    }

    #[test]
    fn kato_two_vertex_closed_form() {
        let g = families::two_vertex(1.0, [1.0, 1.0]);
        let w = Potential::new(vec![1.0, 0.0]).unwrap();
        // ∫₀¹ (1 + e^{−2s})/2 ds
        let oracle = 0.5 + (1.0 - (-2.0f64).exp()) / 4.0;
        let k = kato_modulus(&g, &w, 1.0).unwrap();
        assert!((k - oracle).abs() < 1e-8, "{k} vs {oracle}");
        assert!((oracle - 0.716166).abs() < 1e-6);
    }

    #[test]
    fn kato_tends_to_zero() {
        let g = families::path(5);
        let w = Potential::new(vec![1.0, -1.0, 2.0, 0.0, 0.5]).unwrap();
        let small = kato_modulus(&g, &w, 1e-6).unwrap();
        assert!(small < 3e-6);
    }

    #[test]
    fn witness_examples() {
        let g = families::two_vertex(1.0, [1.0, 1.0]);
        assert_eq!(infinitesimal_class_witness(&g, &Potential::zero(2), 0.5).unwrap(), 0.0);
        let w = Potential::new(vec![4.0, 0.0]).unwrap();
        assert!((infinitesimal_class_witness(&g, &w, 0.0).unwrap() - 4.0).abs() < 1e-14);
        let c = infinitesimal_class_witness(&g, &w, 1.0).unwrap();
        assert!((c - (1.0 + 5f64.sqrt())).abs() < 1e-12);
        assert!(infinitesimal_class_witness(&g, &w, -1.0).is_err());
    }

    #[test]
    fn divergent_profile_is_inadmissible() {
        let r = ricci_admissibility(&profile(2, 1.0, 100, CoefficientRule::Constant { value: 1.0 })).unwrap();
        assert_eq!(r.verdict, Admissibility::Inadmissible);
        assert!(matches!(r.certificate, Some(Certificate::NonDecreasing { .. })));
    }

    #[test]
    fn gaussian_profile_is_admissible() {
        let p = profile(3, 1.0, 60, CoefficientRule::Gaussian { scale: 1.0, shift: 1.0 });
        let r = ricci_admissibility(&p).unwrap();
        assert_eq!(r.verdict, Admissibility::Admissible);
        // Oracle: direct sum, with the remainder beyond k=30 below e^{−700}.
        let direct: f64 = (2..=30)
            .map(|k| {
                let k = k as f64;
                (-(k - 1.0).powi(2) + 3.0 * k.ln() + 2.0 * k * 2f64.sqrt()).exp()
            })
            .sum();
        assert!((r.partial_sum() - direct).abs() < 1e-12 * direct);
        assert!(r.rows.last().unwrap().term == 0.0);
    }

    #[test]
    fn p_series_is_admissible() {
        let r = ricci_admissibility(&profile(1, 0.0, 400, CoefficientRule::Power { exponent: 3.0 })).unwrap();
        assert_eq!(r.verdict, Admissibility::Admissible);
        match r.certificate {
            Some(Certificate::PowerLaw { exponent, tail_bound }) => {
                assert!((exponent - 2.0).abs() < 1e-9);
                assert!((tail_bound - 1.0 / 400.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
        let oracle = std::f64::consts::PI.powi(2) / 6.0 - 1.0;
        assert!((r.partial_sum() - oracle).abs() < 1.0 / 399.0);
    }

    #[test]
    fn harmonic_profile_is_not_certified() {
        let r = ricci_admissibility(&profile(1, 0.0, 200, CoefficientRule::Power { exponent: 2.0 })).unwrap();
        assert_eq!(r.verdict, Admissibility::Undecided);
    }

    #[test]
    fn verdicts_stable_under_doubling() {
        let cases = [
            profile(2, 1.0, 50, CoefficientRule::Constant { value: 1.0 }),
            profile(3, 1.0, 50, CoefficientRule::Gaussian { scale: 1.0, shift: 1.0 }),
            profile(2, 0.5, 50, CoefficientRule::Gaussian { scale: 0.3, shift: 1.0 }),
            profile(1, 0.0, 50, CoefficientRule::Power { exponent: 3.0 }),
            profile(2, 1.0, 50, CoefficientRule::Exponential { rate: 4.0 }),
        ];
        for p in cases {
            let a = ricci_admissibility(&p).unwrap().verdict;
            let b = ricci_admissibility(&p.with_k_max(2 * p.k_max)).unwrap().verdict;
            assert_eq!(a, b, "{p:?}");
            assert_ne!(a, Admissibility::Undecided, "{p:?}");
        }
    }

    #[test]
    fn doubling_form_matches_ricci_up_to_constant() {
        let p = profile(2, 1.0, 40, CoefficientRule::Gaussian { scale: 1.0, shift: 1.0 });
        let r = ricci_admissibility(&p).unwrap();
        let d = doubling_admissibility(&p).unwrap();
        assert_eq!(r.verdict, d.verdict);
        for (a, b) in r.rows.iter().zip(&d.rows) {
            assert!((b.log_term - a.log_term - 2.0 * 2f64.ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn profile_documents() {
        let src = r#"{"m": 2, "A": 1.0, "k_max": 80, "c_k": {"rule": "table", "values": [1, 2]}}"#;
        let p: GrowthProfile = serde_json::from_str(src).unwrap();
        assert!(matches!(ricci_admissibility(&p), Err(Error::Config(_))));
        let src = r#"{"m": 2, "A": 1.0, "k_max": 80, "c_k": {"rule": "gaussian", "scale": 2.0, "shift": 1.0}}"#;
        let p: GrowthProfile = serde_json::from_str(src).unwrap();
        assert_eq!(ricci_admissibility(&p).unwrap().verdict, Admissibility::Admissible);
        assert!(profile(0, 1.0, 40, CoefficientRule::Constant { value: 1.0 }).validate().is_err());
        assert!(profile(2, -1.0, 40, CoefficientRule::Constant { value: 1.0 }).validate().is_err());
        let zero = profile(2, 1.0, 40, CoefficientRule::Constant { value: 0.0 });
        assert!(ricci_admissibility(&zero).is_err());
        let neg = profile(2, 1.0, 40, CoefficientRule::Constant { value: -1.0 });
        assert!(ricci_admissibility(&neg).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn kato_monotone_and_subadditive(seed in 0u64..500, s in 0.05f64..1.0, t in 0.05f64..1.0) {
            let g = families::random_connected(5, 0.4, (0.2, 1.0), (0.5, 2.0), seed);
            let w = Potential::new((0..5).map(|i| ((seed + i) % 7) as f64 - 3.0).collect()).unwrap();
            let ks = kato_modulus(&g, &w, s).unwrap();
            let kt = kato_modulus(&g, &w, t).unwrap();
            let kst = kato_modulus(&g, &w, s + t).unwrap();
            prop_assert!(kst >= ks.max(kt) - 1e-10);
            prop_assert!(kst <= ks + kt + 1e-10);
        }

        #[test]
        fn witness_monotone_convex(seed in 0u64..500, e in 0.0f64..3.0, d in 0.01f64..1.0) {
            let g = families::random_connected(5, 0.4, (0.2, 1.0), (0.5, 2.0), seed);
            let w = Potential::new((0..5).map(|i| ((seed * 3 + i) % 5) as f64 - 2.0).collect()).unwrap();
            let c0 = infinitesimal_class_witness(&g, &w, e).unwrap();
            let c1 = infinitesimal_class_witness(&g, &w, e + d).unwrap();
            let c2 = infinitesimal_class_witness(&g, &w, e + 2.0 * d).unwrap();
            prop_assert!(c0 >= 0.0);
            prop_assert!(c1 <= c0 + 1e-12);
            prop_assert!(c1 <= (c0 + c2) / 2.0 + 1e-12);
        }
    }
}
