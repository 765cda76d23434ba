//! Excursions of reflected Brownian motion: duration histogram against the
//! Poisson intensity, tail counts from the streaming sampler, and the
//! crossing thinning ρ(h)/√h.
//! Usage: `cargo run --release --example excursions [local_time] [thinning_reps]`.

use bnet::excursion::{
    crossing_thinning_estimate, decompose_excursions, excursion_tail_counts, histogram, histogram_csv, ReflectedWalk,
    TailConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let local_time: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200.0);
    let reps: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2000);

    let mut rng = bnet::rng::replicate_rng(1, 0);
    let walk = ReflectedWalk::simulate(2_000_000, 1e-5, &mut rng)?;
    let records = decompose_excursions(&walk);
    println!(
        "stored walk: horizon {}, compensator {:.3}, {} excursions",
        walk.horizon(),
        walk.local_time(),
        records.len()
    );
    print!("{}", histogram_csv(&histogram(&records, walk.local_time(), 1e-3, 5)));

    let tail = excursion_tail_counts(&TailConfig {
        hs: vec![0.01, 0.1, 1.0],
        dt: 1e-6,
        local_time,
        cap: 1.0,
        chunks: 16,
        seed: 2,
    })?;
    for (h, r) in &tail.rows {
        println!(
            "h = {h}: {:.4} ± {:.4} per unit compensator, reference {:.4}",
            r.estimate,
            r.stderr,
            r.reference.unwrap()
        );
    }

    for h in [0.04, 0.16, 0.64] {
        let t = crossing_thinning_estimate(h, reps, 3, None)?;
        println!(
            "h = {h}: ρ/√h indicator {:.3} ± {:.3}, closed form {:.3} ± {:.3}",
            t.indicator.estimate, t.indicator.stderr, t.closed_form.estimate, t.closed_form.stderr
        );
    }
    Ok(())
}
