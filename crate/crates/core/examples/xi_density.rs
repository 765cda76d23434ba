//! Density of the set of sites reached from every site at time 0, against
//! Ψ(t), plus the exact occupancy of a tiny window by enumeration.
//! Usage: `cargo run --release --example xi_density [epsilon] [reps]`.

use bnet::classify::{occupancy_estimate, xi_density_estimate, XiDensityConfig};
use bnet::oracle::exact_mean_occupancy;
use bnet::stats::psi;
use bnet::LatticeConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let epsilon: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.1);
    let reps: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200);

    for time in [0.25, 0.5, 1.0] {
        let r = xi_density_estimate(&XiDensityConfig { epsilon, time, width: 40.0, reps, seed: 1 })?;
        println!("t = {time}: density {:.4} ± {:.4}, Ψ(t) = {:.4}", r.estimate, r.stderr, psi(time));
    }

    let small = LatticeConfig::new(0.5, 0, 4, 0, 4, 9);
    let exact = exact_mean_occupancy(&small)?;
    let mc = occupancy_estimate(&small, 20_000)?;
    println!("5×5 window, ε = 0.5: exact {exact:.5}, sampled {:.5} ± {:.5}", mc.estimate, mc.stderr);
    Ok(())
}
