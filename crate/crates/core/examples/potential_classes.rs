//! Kato modulus and form-boundedness witness for a graph potential, then
//! admissibility verdicts for a few growth profiles.
//!
//! ```bash
//! cargo run --release --example potential_classes
//! ```

use heatlab::graph::families;
use heatlab::potential_class::{
    doubling_admissibility, infinitesimal_class_witness, kato_modulus, ricci_admissibility, CoefficientRule,
    GrowthProfile,
};
use heatlab::schrodinger::Potential;

fn main() -> heatlab::Result<()> {
    let g = families::star(&[1.0, 2.0, 0.5], 1.0);
    let w = Potential::new(vec![-3.0, 1.0, 0.0, 2.0])?;
    for t in [1.0, 0.1, 0.01] {
        println!("Kato modulus at t = {t:<5} {:.6}", kato_modulus(&g, &w, t)?);
    }
    for eps in [1.0, 0.1, 0.01] {
        println!("witness at ε = {eps:<5} {:.4}", infinitesimal_class_witness(&g, &w, eps)?);
    }

    let profiles = [
        ("flat", CoefficientRule::Constant { value: 1.0 }),
        ("quadratic growth", CoefficientRule::Gaussian { scale: 1.0, shift: 1.0 }),
        ("slow exponential", CoefficientRule::Exponential { rate: 1.0 }),
        ("fast exponential", CoefficientRule::Exponential { rate: 4.0 }),
    ];
    println!();
    for (name, c_k) in profiles {
        let p = GrowthProfile {
            dim: 2,
            ricci_bound: 1.0,
            k_max: 200,
            c_k,
        };
        let r = ricci_admissibility(&p)?;
        let d = doubling_admissibility(&p)?;
        println!("{name:<18} ricci {:?}  doubling {:?}  partial sum {:.4e}", r.verdict, d.verdict, r.partial_sum());
    }
    Ok(())
}
