//! Relevant separation points in a rescaled box against the density integral.
//! Usage: `cargo run --release --example relevant_density [epsilon] [reps]`.

use bnet::classify::{relevant_density_estimate, relevant_separation_points, RelevantDensityConfig};
use bnet::{sample_arrow_field, LatticeConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let epsilon: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.1);
    let reps: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200);

    let field = sample_arrow_field(&LatticeConfig::new(0.3, -20, 20, 0, 10, 4).with_margin(12))?;
    let rel = relevant_separation_points(&field, 0, 10)?;
    println!("one field: (0,10)-relevant sites {:?}", rel.sites);

    let r =
        relevant_density_estimate(&RelevantDensityConfig { epsilon, s: 0.0, u: 1.0, a: 0.0, b: 1.0, reps, seed: 1 })?;
    println!(
        "ε = {epsilon}: {:.4} ± {:.4} per box, integral {:.4}, ratio {:.3}",
        r.estimate,
        r.stderr,
        r.reference.unwrap(),
        r.ratio.unwrap()
    );
    Ok(())
}
