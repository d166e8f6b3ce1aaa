//! Config-driven experiments and the suite runner.
//!
//! A config is one JSON object whose `kind` selects the experiment. Paths
//! inside it are relative to the config file. Each run writes
//! `<out>/<name>.csv` and `<out>/<name>.json` and yields a list of named
//! checks; the exit code is 0 when all pass, 1 when one fails, 2 when the
//! config or its inputs cannot be used.

use crate::error::{Error, Result};
use crate::graph::{load_graph, WeightedGraph};
use crate::heat_kernel::{heat_semigroup, killed_kernel, verify_axioms, AxiomReport};
use crate::potential_class::{load_profile, ricci_admissibility, Admissibility, AdmissibilityReport};
use crate::sampler::{feynman_kac_trace_mc, no_jump_lower_bound, pnfb_probability};
use crate::schrodinger::{default_grid, geometric_grid, graph_semiclassical_scan, trace_semigroup, Potential, ScanTolerance};
use crate::torus::{torus_semiclassical_scan, GalerkinOptions, TorusModel, TorusPotential, TraceScaling};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Geometric { start: f64, ratio: f64, count: usize },
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        let pts = match self {
            Self::List(v) => v.clone(),
            Self::Geometric { start, ratio, count } => {
                if !(*ratio > 0.0 && *ratio < 1.0) {
                    return Err(Error::Config(format!("grid ratio {ratio} must lie in (0, 1)")));
                }
                geometric_grid(*start, *ratio, *count)
            }
        };
        if pts.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if let Some(t) = pts.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::NonpositiveTime(*t));
        }
        Ok(pts)
    }
}

/// Vertex potential: one value per vertex in file order, a map from vertex
/// label to value (missing labels are 0), `"zero"` or `"constant:<c>"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSpec {
    Values(Vec<f64>),
    ByLabel(BTreeMap<String, f64>),
    Named(String),
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self::Named("zero".into())
    }
}

impl PotentialSpec {
    pub fn resolve(&self, graph: &WeightedGraph) -> Result<Potential> {
        match self {
            Self::Values(v) => {
                if v.len() != graph.len() {
                    return Err(Error::DimensionMismatch {
                        expected: graph.len(),
                        got: v.len(),
                    });
                }
                Potential::new(v.clone())
            }
            Self::ByLabel(map) => {
                let mut v = vec![0.0; graph.len()];
                for (label, value) in map {
                    let x = graph.index_of(label)?;
                    v[x] = *value;
                }
                Potential::new(v)
            }
            Self::Named(s) if s == "zero" => Ok(Potential::zero(graph.len())),
            Self::Named(s) => match s.strip_prefix("constant:").map(|c| c.trim().parse::<f64>()) {
                Some(Ok(c)) => Potential::new(vec![c; graph.len()]),
                _ => Err(Error::Config(format!("unknown potential `{s}`"))),
            },
        }
    }
}

fn default_tolerance() -> f64 {
    0.01
}
fn default_window() -> usize {
    5
}
fn default_true() -> bool {
    true
}
fn default_grid_spec() -> GridSpec {
    GridSpec::List(default_grid())
}
fn default_z() -> f64 {
    3.0
}
fn default_samples() -> usize {
    100_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExperimentKind {
    GraphLimit {
        graph: String,
        #[serde(default)]
        potential: PotentialSpec,
        #[serde(default = "default_grid_spec")]
        t_grid: GridSpec,
        #[serde(default = "default_tolerance")]
        tolerance: f64,
        #[serde(default = "default_window")]
        tail_window: usize,
        #[serde(default = "default_true")]
        require_monotone: bool,
    },
    TorusLimit {
        dim: usize,
        lengths: Vec<f64>,
        truncation: usize,
        potential: String,
        #[serde(default = "default_grid_spec")]
        t_grid: GridSpec,
        #[serde(default = "default_tolerance")]
        tolerance: f64,
        #[serde(default)]
        scaling: TraceScaling,
        #[serde(default = "default_true")]
        truncation_check: bool,
        #[serde(default = "default_window")]
        tail_window: usize,
        #[serde(default)]
        require_monotone: bool,
    },
    FkCrosscheck {
        graph: String,
        #[serde(default)]
        potential: PotentialSpec,
        times: Vec<f64>,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_z")]
        max_z: f64,
        /// Largest allowed standard error relative to the exact trace.
        #[serde(default = "default_tolerance")]
        max_relative_std_error: f64,
    },
    Pnfb {
        graph: String,
        vertex: String,
        /// Labels of K; defaults to the vertex and its neighbours.
        #[serde(default)]
        region: Option<Vec<String>>,
        times: Vec<f64>,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_z")]
        max_z: f64,
        /// Lower limit for the estimate at the last time.
        #[serde(default)]
        final_min: Option<f64>,
    },
    Axioms {
        graphs: Vec<String>,
        s: f64,
        t: f64,
        #[serde(default)]
        tolerances: AxiomTolerances,
    },
    Admissibility {
        profile: String,
        #[serde(default)]
        expect: Option<Admissibility>,
        /// Re-run with doubled `k_max` and require the same verdict.
        #[serde(default = "default_true")]
        check_doubling: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiomTolerances {
    pub chapman_kolmogorov: f64,
    pub symmetry: f64,
    pub mass: f64,
}

impl Default for AxiomTolerances {
    fn default() -> Self {
        Self {
            chapman_kolmogorov: 1e-10,
            symmetry: 1e-12,
            mass: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Output basename; defaults to the config file stem.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    /// Output directory relative to the config file.
    #[serde(default)]
    pub output: Option<String>,
    #[serde(flatten)]
    pub kind: ExperimentKind,
}

impl ExperimentConfig {
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ExperimentKind::GraphLimit { .. } => "graph-limit",
            ExperimentKind::TorusLimit { .. } => "torus-limit",
            ExperimentKind::FkCrosscheck { .. } => "fk-crosscheck",
            ExperimentKind::Pnfb { .. } => "pnfb",
            ExperimentKind::Axioms { .. } => "axioms",
            ExperimentKind::Admissibility { .. } => "admissibility",
        }
    }
}

/// A config file together with the directory its paths resolve against.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub path: PathBuf,
    pub base: PathBuf,
    pub config: ExperimentConfig,
}

impl LoadedConfig {
    pub fn name(&self) -> String {
        self.config.name.clone().unwrap_or_else(|| {
            self.path
                .file_stem()
                .map_or_else(|| "experiment".into(), |s| s.to_string_lossy().into_owned())
        })
    }

    fn resolve(&self, rel: &str) -> PathBuf {
        self.base.join(rel)
    }

    fn graph(&self, rel: &str) -> Result<WeightedGraph> {
        load_graph(self.resolve(rel))
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<LoadedConfig> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let config: ExperimentConfig =
        serde_json::from_str(&src).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(LoadedConfig {
        path: path.to_path_buf(),
        base: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        config,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }

    fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value >= limit,
        }
    }

    fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: f64::from(u8::from(ok)),
            limit: 1.0,
            passed: ok,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunOutcome {
    pub name: String,
    pub kind: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub csv_path: PathBuf,
    #[serde(skip)]
    pub json_path: PathBuf,
}

impl RunOutcome {
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Exit code for a run result: 0 pass, 1 failed check, 2 unusable input.
pub fn exit_code(result: &Result<RunOutcome>) -> i32 {
    match result {
        Ok(o) => o.exit_code(),
        Err(_) => 2,
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the config's output directory.
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

struct Artifacts {
    checks: Vec<Check>,
    csv: String,
    details: serde_json::Value,
}

pub fn run(loaded: &LoadedConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let seed = opts.seed.unwrap_or(loaded.config.seed);
    let art = match &loaded.config.kind {
        ExperimentKind::GraphLimit {
            graph,
            potential,
            t_grid,
            tolerance,
            tail_window,
            require_monotone,
        } => {
            check_positive("tolerance", *tolerance)?;
            let g = loaded.graph(graph)?;
            let w = potential.resolve(&g)?;
            let tol = ScanTolerance {
                relative: *tolerance,
                tail_window: *tail_window,
                ..Default::default()
            };
            let report = graph_semiclassical_scan(&g, &w, &t_grid.points()?, tol)?;
            let mut checks = vec![
                Check::at_most("relative_final_error", report.verdict.relative_final_error, *tolerance),
                Check::holds("golden_thompson", report.verdict.gt_respected),
            ];
            if *require_monotone {
                checks.push(Check::holds("tail_nonincreasing", report.verdict.tail_nonincreasing));
            }
            Artifacts {
                checks,
                csv: report.to_csv(),
                details: serde_json::to_value(&report)?,
            }
        }
        ExperimentKind::TorusLimit {
            dim,
            lengths,
            truncation,
            potential,
            t_grid,
            tolerance,
            scaling,
            truncation_check,
            tail_window,
            require_monotone,
        } => {
            check_positive("tolerance", *tolerance)?;
            if *dim != lengths.len() {
                return Err(Error::Config(format!("dim = {dim} but {} side lengths given", lengths.len())));
            }
            let w = TorusPotential::from_spec(potential, &loaded.base)?;
            let mut model = TorusModel::new(lengths.clone(), *truncation, w)?;
            model.scaling = *scaling;
            let gopts = GalerkinOptions {
                check_truncation: *truncation_check,
                ..Default::default()
            };
            let tol = ScanTolerance {
                relative: *tolerance,
                tail_window: *tail_window,
                ..Default::default()
            };
            let report = torus_semiclassical_scan(&model, &t_grid.points()?, gopts, tol)?;
            let mut checks = vec![
                Check::at_most("relative_final_error", report.verdict.relative_final_error, *tolerance),
                Check::holds("golden_thompson", report.verdict.gt_respected),
            ];
            if *require_monotone {
                checks.push(Check::holds("tail_nonincreasing", report.verdict.tail_nonincreasing));
            }
            Artifacts {
                checks,
                csv: report.to_csv(),
                details: serde_json::to_value(&report)?,
            }
        }
        ExperimentKind::FkCrosscheck {
            graph,
            potential,
            times,
            samples,
            max_z,
            max_relative_std_error,
        } => {
            check_positive("max_z", *max_z)?;
            check_positive("max_relative_std_error", *max_relative_std_error)?;
            let g = loaded.graph(graph)?;
            let w = potential.resolve(&g)?;
            fk_crosscheck(&g, &w, times, *samples, seed, *max_z, *max_relative_std_error)?
        }
        ExperimentKind::Pnfb {
            graph,
            vertex,
            region,
            times,
            samples,
            max_z,
            final_min,
        } => {
            check_positive("max_z", *max_z)?;
            let g = loaded.graph(graph)?;
            let x = g.index_of(vertex)?;
            let k = match region {
                Some(labels) => labels
                    .iter()
                    .map(|l| g.index_of(l))
                    .collect::<Result<Vec<_>>>()?,
                None => std::iter::once(x).chain(g.neighbors(x).iter().map(|e| e.0)).collect(),
            };
            pnfb_experiment(&g, x, &k, times, *samples, seed, *max_z, *final_min)?
        }
        ExperimentKind::Axioms { graphs, s, t, tolerances } => {
            let graphs = graphs
                .iter()
                .map(|p| loaded.graph(p).map(|g| (p.clone(), g)))
                .collect::<Result<Vec<_>>>()?;
            axioms_experiment(&graphs, *s, *t, *tolerances)?
        }
        ExperimentKind::Admissibility {
            profile,
            expect,
            check_doubling,
        } => {
            let p = load_profile(loaded.resolve(profile))?;
            let report = ricci_admissibility(&p)?;
            let mut checks = Vec::new();
            if let Some(want) = expect {
                checks.push(Check::holds(format!("verdict_is_{}", verdict_name(*want)), report.verdict == *want));
            }
            let doubled: Option<AdmissibilityReport> = if *check_doubling {
                let d = ricci_admissibility(&p.with_k_max(2 * p.k_max))?;
                checks.push(Check::holds("stable_under_doubling", d.verdict == report.verdict));
                Some(d)
            } else {
                None
            };
            Artifacts {
                checks,
                csv: report.to_csv(),
                details: json!({
                    "verdict": report.verdict,
                    "certificate": report.certificate,
                    "window": report.window,
                    "partial_sum": report.partial_sum(),
                    "doubled_verdict": doubled.as_ref().map(|d| d.verdict),
                }),
            }
        }
    };
    write_outputs(loaded, opts, seed, art)
}

fn verdict_name(v: Admissibility) -> &'static str {
    match v {
        Admissibility::Admissible => "admissible",
        Admissibility::Inadmissible => "inadmissible",
        Admissibility::Undecided => "undecided",
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

fn fk_crosscheck(
    g: &WeightedGraph,
    w: &Potential,
    times: &[f64],
    samples: usize,
    seed: u64,
    max_z: f64,
    max_rel_se: f64,
) -> Result<Artifacts> {
    let mut csv = String::from("t,mean,std_error,n_samples,seed,exact,z_score\n");
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        let est = feynman_kac_trace_mc(g, w, t, samples, seed.wrapping_add(i as u64))?;
        let exact = trace_semigroup(g, w, t)?;
        let z = est.z_score(exact);
        writeln!(
            csv,
            "{t:e},{:e},{:e},{},{},{exact:e},{z:e}",
            est.mean, est.std_error, est.n_samples, est.seed
        )
        .unwrap();
        checks.push(Check::at_most(format!("z_score[t={t}]"), z, max_z));
        checks.push(Check::at_most(format!("relative_std_error[t={t}]"), est.std_error / exact, max_rel_se));
        rows.push(json!({"t": t, "estimate": est, "exact": exact, "z_score": z}));
    }
    Ok(Artifacts {
        checks,
        csv,
        details: json!({ "rows": rows }),
    })
}

#[allow(clippy::too_many_arguments)]
fn pnfb_experiment(
    g: &WeightedGraph,
    x: usize,
    k: &[usize],
    times: &[f64],
    samples: usize,
    seed: u64,
    max_z: f64,
    final_min: Option<f64>,
) -> Result<Artifacts> {
    let mut csv = String::from("t,mean,std_error,n_samples,seed,exact_ratio,no_jump_bound\n");
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut prev: Option<f64> = None;
    let mut last = None;
    for (i, &t) in times.iter().enumerate() {
        let est = pnfb_probability(g, x, k, t, samples, seed.wrapping_add(i as u64))?;
        let exact = killed_kernel(g, k, t, &x, &x)? / heat_semigroup(g, t)?.get(x, x);
        let bound = no_jump_lower_bound(g, x, t)?;
        writeln!(
            csv,
            "{t:e},{:e},{:e},{},{},{exact:e},{bound:e}",
            est.mean, est.std_error, est.n_samples, est.seed
        )
        .unwrap();
        // With no observed exits the sample error is 0; fall back to the
        // binomial error under the exact probability.
        let se = est.std_error.max((exact * (1.0 - exact) / samples as f64).sqrt());
        checks.push(Check::at_most(format!("exact_within_z[t={t}]"), (est.mean - exact).abs() / se, max_z));
        checks.push(Check::at_least(format!("above_no_jump_bound[t={t}]"), est.mean, bound - max_z * se));
        if let Some(p) = prev {
            checks.push(Check::at_least(format!("nondecreasing[t={t}]"), est.mean, p));
        }
        prev = Some(est.mean);
        last = Some(est.mean);
        rows.push(json!({"t": t, "estimate": est, "exact_ratio": exact, "no_jump_bound": bound}));
    }
    if let (Some(min), Some(v)) = (final_min, last) {
        checks.push(Check::at_least("final_estimate", v, min));
    }
    Ok(Artifacts {
        checks,
        csv,
        details: json!({ "vertex": x, "region": k, "rows": rows }),
    })
}

fn axioms_experiment(graphs: &[(String, WeightedGraph)], s: f64, t: f64, tol: AxiomTolerances) -> Result<Artifacts> {
    let mut csv = String::from("graph,s,t,chapman_kolmogorov,symmetry,presymmetry,mass_min,mass_max,min_entry\n");
    let mut checks = Vec::new();
    let mut reports: Vec<(String, AxiomReport)> = Vec::new();
    for (name, g) in graphs {
        let r = verify_axioms(&heat_semigroup(g, s)?, &heat_semigroup(g, t)?, &heat_semigroup(g, s + t)?)?;
        writeln!(
            csv,
            "{name},{s:e},{t:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.chapman_kolmogorov, r.symmetry, r.presymmetry, r.mass_min, r.mass_max, r.min_entry
        )
        .unwrap();
        checks.push(Check::at_most(format!("chapman_kolmogorov[{name}]"), r.chapman_kolmogorov, tol.chapman_kolmogorov));
        checks.push(Check::at_most(format!("symmetry[{name}]"), r.presymmetry.max(r.symmetry), tol.symmetry));
        let mass_dev = (r.mass_max - 1.0).max(1.0 - r.mass_min);
        checks.push(Check::at_most(format!("mass[{name}]"), mass_dev, tol.mass));
        checks.push(Check::at_least(format!("positivity[{name}]"), r.min_entry, f64::MIN_POSITIVE));
        reports.push((name.clone(), r));
    }
    Ok(Artifacts {
        checks,
        csv,
        details: serde_json::to_value(&reports)?,
    })
}

fn write_outputs(loaded: &LoadedConfig, opts: &RunOptions, seed: u64, art: Artifacts) -> Result<RunOutcome> {
    let dir = match (&opts.out_dir, &loaded.config.output) {
        (Some(d), _) => d.clone(),
        (None, Some(rel)) => loaded.resolve(rel),
        (None, None) => PathBuf::from("results"),
    };
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let name = loaded.name();
    let passed = art.checks.iter().all(|c| c.passed);
    let outcome = RunOutcome {
        name: name.clone(),
        kind: loaded.config.kind_name().to_string(),
        seed,
        passed,
        checks: art.checks,
        csv_path: dir.join(format!("{name}.csv")),
        json_path: dir.join(format!("{name}.json")),
    };
    let doc = json!({
        "name": outcome.name,
        "kind": outcome.kind,
        "seed": seed,
        "passed": passed,
        "checks": outcome.checks,
        "report": art.details,
    });
    std::fs::write(&outcome.csv_path, art.csv).map_err(|e| Error::io(&outcome.csv_path, e))?;
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    std::fs::write(&outcome.json_path, text).map_err(|e| Error::io(&outcome.json_path, e))?;
    Ok(outcome)
}

/// Loads and runs one config file.
pub fn run_path(path: impl AsRef<Path>, opts: &RunOptions) -> Result<RunOutcome> {
    run(&load_config(path)?, opts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteEntry {
    pub config: String,
    pub kind: String,
    pub status: SuiteStatus,
    /// First failing check or the error message.
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteSummary {
    pub entries: Vec<SuiteEntry>,
}

impl SuiteSummary {
    pub fn count(&self, status: SuiteStatus) -> usize {
        self.entries.iter().filter(|e| e.status == status).count()
    }

    /// 2 if any config was unusable, else 1 if any failed, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.count(SuiteStatus::Error) > 0 {
            2
        } else if self.count(SuiteStatus::Fail) > 0 {
            1
        } else {
            0
        }
    }

    /// Columns: config, kind, status, detail.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("config,kind,status,detail\n");
        for e in &self.entries {
            let status = match e.status {
                SuiteStatus::Pass => "pass",
                SuiteStatus::Fail => "fail",
                SuiteStatus::Error => "error",
            };
            writeln!(out, "{},{},{status},{}", e.config, e.kind, csv_field(&e.detail)).unwrap();
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Config files (`*.json`) directly inside `dir`, sorted by name.
pub fn suite_configs(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    Ok(paths)
}

/// Runs every config in `dir` in parallel; writes `summary.csv` to the
/// output directory when one is given.
pub fn run_suite(dir: impl AsRef<Path>, opts: &RunOptions) -> Result<SuiteSummary> {
    let paths = suite_configs(dir)?;
    let entries = paths
        .par_iter()
        .map(|p| {
            let config = p.file_name().unwrap().to_string_lossy().into_owned();
            match load_config(p) {
                Err(e) => SuiteEntry {
                    config,
                    kind: String::new(),
                    status: SuiteStatus::Error,
                    detail: e.to_string(),
                },
                Ok(loaded) => {
                    let kind = loaded.config.kind_name().to_string();
                    match run(&loaded, opts) {
                        Ok(o) => SuiteEntry {
                            config,
                            kind,
                            status: if o.passed { SuiteStatus::Pass } else { SuiteStatus::Fail },
                            detail: o.first_failure().map(|c| c.name.clone()).unwrap_or_default(),
                        },
                        Err(e) => SuiteEntry {
                            config,
                            kind,
                            status: SuiteStatus::Error,
                            detail: e.to_string(),
                        },
                    }
                }
            }
        })
        .collect();
    let summary = SuiteSummary { entries };
    if let Some(dir) = &opts.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("summary.csv");
        std::fs::write(&path, summary.to_csv()).map_err(|e| Error::io(&path, e))?;
    }
    Ok(summary)
}
