//! Command-line front end for experiments and one-off checks.

use clap::{Parser, Subcommand, ValueEnum};
use heatlab::experiment::{exit_code, run_path, run_suite, RunOptions, SuiteStatus};
use heatlab::graph::load_graph;
use heatlab::heat_kernel::{heat_semigroup, verify_axioms};
use heatlab::potential_class::{admissibility_with, load_profile, SeriesForm};
use heatlab::sampler::{
    bridge_functional_mc, feynman_kac_trace_mc, free_marginal_mc, no_jump_lower_bound, pnfb_probability, McEstimate,
};
use heatlab::schrodinger::Potential;
use heatlab::{Error, Result};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "heatlab", version, about = "Heat kernels, Schrödinger traces and path sampling on graphs and tori")]
struct Cli {
    /// Master seed; overrides the seed in configs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run { config: PathBuf },
    /// Run every *.json config in a directory.
    Suite { dir: PathBuf },
    /// Check the kernel axioms at times s, t and s + t; optionally dump p(t).
    VerifyKernel {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        /// Write p(t,·,·) here (`.bin` for the binary dump, CSV otherwise).
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Monte Carlo over jump paths.
    SamplePaths {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Mode::Free)]
        mode: Mode,
        /// Start vertex label (default: first vertex).
        #[arg(long)]
        from: Option<String>,
        /// Bridge end vertex label (default: the start).
        #[arg(long)]
        to: Option<String>,
        /// Comma-separated labels of K for `pnfb` (default: start and neighbours).
        #[arg(long, value_delimiter = ',')]
        region: Option<Vec<String>>,
        /// Comma-separated potential values in vertex order (default: zero).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        potential: Option<Vec<f64>>,
    },
    /// Evaluate a growth profile's admissibility series.
    CheckAdmissibility {
        profile: PathBuf,
        #[arg(long, value_enum, default_value_t = Form::Ricci)]
        form: Form,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Law of γ(t) from the start vertex.
    Free,
    /// E[e^{−∫w}] over bridges from start to end.
    Bridge,
    /// Feynman–Kac trace estimate.
    FkTrace,
    /// Probability that the bridge back to the start stays in K.
    Pnfb,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Ricci,
    Doubling,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let code = match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    ExitCode::from(code as u8)
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let opts = RunOptions {
        out_dir: cli.out.clone(),
        seed: cli.seed,
    };
    match &cli.command {
        Command::Run { config } => {
            let result = run_path(config, &opts);
            match &result {
                Ok(o) => {
                    for c in &o.checks {
                        println!("{} {} value={:e} limit={:e}", if c.passed { "pass" } else { "FAIL" }, c.name, c.value, c.limit);
                    }
                    println!("wrote {} and {}", o.csv_path.display(), o.json_path.display());
                    if let Some(c) = o.first_failure() {
                        eprintln!("assertion failed: {}", c.name);
                    }
                }
                Err(e) => eprintln!("error: {e}"),
            }
            Ok(exit_code(&result))
        }
        Command::Suite { dir } => {
            let summary = run_suite(dir, &opts)?;
            print!("{}", summary.to_csv());
            println!(
                "{} pass / {} fail / {} error",
                summary.count(SuiteStatus::Pass),
                summary.count(SuiteStatus::Fail),
                summary.count(SuiteStatus::Error)
            );
            Ok(summary.exit_code())
        }
        Command::VerifyKernel { graph, s, t, dump } => {
            let g = load_graph(graph)?;
            let at_t = heat_semigroup(&g, *t)?;
            let report = verify_axioms(&heat_semigroup(&g, *s)?, &at_t, &heat_semigroup(&g, s + t)?)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if let Some(path) = dump {
                let path = match &cli.out {
                    Some(dir) => dir.join(path),
                    None => path.clone(),
                };
                let bytes = if path.extension().is_some_and(|e| e == "bin") {
                    at_t.to_binary()
                } else {
                    at_t.to_csv().into_bytes()
                };
                std::fs::write(&path, bytes).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
            }
            Ok(if report.passed { 0 } else { 1 })
        }
        Command::SamplePaths {
            graph,
            t,
            samples,
            mode,
            from,
            to,
            region,
            potential,
        } => {
            let g = load_graph(graph)?;
            let seed = cli.seed.unwrap_or(0);
            let x = match from {
                Some(l) => g.index_of(l)?,
                None => 0,
            };
            let w = match potential {
                Some(v) if v.len() != g.len() => {
                    return Err(Error::DimensionMismatch {
                        expected: g.len(),
                        got: v.len(),
                    })
                }
                Some(v) => Potential::new(v.clone())?,
                None => Potential::zero(g.len()),
            };
            println!("{}", McEstimate::csv_header());
            match mode {
                Mode::Free => {
                    for (y, est) in free_marginal_mc(&g, x, *t, *samples, seed)?.iter().enumerate() {
                        println!("{}", est.csv_row(&format!("P[end={}]", g.label(y))));
                    }
                }
                Mode::Bridge => {
                    let y = match to {
                        Some(l) => g.index_of(l)?,
                        None => x,
                    };
                    let vals = w.values().to_vec();
                    let est = bridge_functional_mc(&g, x, y, *t, *samples, seed, |p| (-p.integral(&vals)).exp())?;
                    println!("{}", est.csv_row("E[exp(-int w)]"));
                    let jumps = bridge_functional_mc(&g, x, y, *t, *samples, seed, |p| p.jump_count() as f64)?;
                    println!("{}", jumps.csv_row("E[jumps]"));
                }
                Mode::FkTrace => {
                    println!("{}", feynman_kac_trace_mc(&g, &w, *t, *samples, seed)?.csv_row("trace"));
                }
                Mode::Pnfb => {
                    let k = match region {
                        Some(labels) => labels.iter().map(|l| g.index_of(l)).collect::<Result<Vec<_>>>()?,
                        None => std::iter::once(x).chain(g.neighbors(x).iter().map(|e| e.0)).collect(),
                    };
                    println!("{}", pnfb_probability(&g, x, &k, *t, *samples, seed)?.csv_row("pnfb"));
                    eprintln!("no-jump lower bound: {:e}", no_jump_lower_bound(&g, x, *t)?);
                }
            }
            Ok(0)
        }
        Command::CheckAdmissibility { profile, form } => {
            let p = load_profile(profile)?;
            let form = match form {
                Form::Ricci => SeriesForm::Ricci,
                Form::Doubling => SeriesForm::Doubling {
                    rate: p.volume_growth_rate(),
                },
            };
            let report = admissibility_with(&p, form)?;
            let verdict = serde_json::to_string(&report.verdict)?;
            println!("verdict: {}", verdict.trim_matches('"'));
            if let Some(c) = &report.certificate {
                println!("certificate: {}", serde_json::to_string(c)?);
            }
            print!("{}", report.to_csv());
            Ok(0)
        }
    }
}
