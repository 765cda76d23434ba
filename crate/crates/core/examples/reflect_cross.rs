//! Reflect-and-cross against a Brownian barrier: the crossing indicator
//! against E[1 - e^{-2Δ}] on the same paths, and one trajectory as CSV.
//! Usage: `cargo run --release --example reflect_cross [reps]`.

use bnet::sde::{crossing_probability, simulate_reflect_cross, Barrier, ReflectCrossConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reps: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4000);
    let dt = 1e-4;
    for t_end in [0.1, 0.5, 2.0] {
        let cfg = ReflectCrossConfig { x0: -0.2, t_end, dt, clock: None };
        let (ind, closed) = crossing_probability(|r| Barrier::brownian(0.0, 0.0, t_end, dt, r), &cfg, reps, 1)?;
        println!(
            "t = {t_end}: crossed {:.4} ± {:.4}, E[1 - e^(-2Δ)] {:.4} ± {:.4}",
            ind.estimate, ind.stderr, closed.estimate, closed.stderr
        );
    }

    let mut rng = bnet::rng::replicate_rng(2, 0);
    let cfg = ReflectCrossConfig { x0: 0.0, t_end: 1.0, dt: 1e-3, clock: Some(0.2) };
    let tr = simulate_reflect_cross(&Barrier::Constant(0.0), &cfg, &mut rng)?;
    println!("flat barrier, clock 0.2: crossed at {:?}", tr.crossed_at);
    std::fs::write(std::env::temp_dir().join("reflect_cross.csv"), tr.to_csv())?;
    Ok(())
}
