//! Galerkin Schrödinger traces on a circle and a square torus, scaled and
//! compared with the classical phase-space integral.
//!
//! ```bash
//! cargo run --release --example torus_limit
//! ```

use heatlab::schrodinger::{geometric_grid, ScanTolerance};
use heatlab::torus::{torus_semiclassical_scan, GalerkinOptions, TorusModel, TorusPotential};
use std::f64::consts::TAU;

fn main() -> heatlab::Result<()> {
    let opts = GalerkinOptions {
        check_truncation: false,
        ..GalerkinOptions::default()
    };
    let circle = TorusModel::new(vec![TAU], 128, TorusPotential::CosineWell)?;
    let report = torus_semiclassical_scan(&circle, &geometric_grid(1.0, 0.1, 4), opts, ScanTolerance::default())?;
    println!("circle, w = 1 - cos x");
    print!("{}", report.to_csv());

    // A custom potential given pointwise; coefficients come from sampling it.
    let bump = TorusPotential::Evaluator(std::sync::Arc::new(|x: &[f64]| (x[0].sin() * x[1].cos()).powi(2)));
    let square = TorusModel::new(vec![TAU, TAU], 16, bump)?;
    let report = torus_semiclassical_scan(&square, &[0.5, 0.2, 0.1, 0.05], opts, ScanTolerance::default())?;
    println!("\nsquare, w = (sin x cos y)^2");
    print!("{}", report.to_csv());
    println!("relative error at t = 0.05: {:.2e}", report.verdict.relative_final_error);
    Ok(())
}
