//! Sticky gap between a left-most and a right-most path: occupation at 0
//! right after a hit, and the decay of `P[D_t = 0]`.
//! Usage: `cargo run --release --example sticky_gap [reps] [dt]`.

use bnet::sde::{simulate_sticky_gap, sticky_zero_occupation, sticky_zero_probability, StickyGapConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let reps: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10_000);
    let dt: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1e-6);

    let mut rng = bnet::rng::replicate_rng(3, 0);
    let traj = simulate_sticky_gap(&StickyGapConfig::new(0.01, 1e-6), &mut rng)?;
    println!(
        "one path to t = 0.01: {} tau-steps, local time {:.4}, time at zero {:.4}",
        traj.x.len() - 1,
        traj.local_time.last().unwrap(),
        traj.occupation_at_zero(0.01).unwrap()
    );

    let windows = [1e-3, 1e-2, 1e-1];
    let occ = sticky_zero_occupation(&windows, dt, reps, 1)?;
    for (w, r) in windows.iter().zip(&occ) {
        println!("fraction of [0, {w}] at zero: {:.4} ± {:.4}", r.estimate, r.stderr);
    }
    let times = [0.1, 0.2, 0.4, 0.8];
    let p = sticky_zero_probability(&times, 0.0, dt.max(1e-5), reps, 2)?;
    for (t, r) in times.iter().zip(&p) {
        println!("P[D_{t} = 0] = {:.4} ± {:.4}", r.estimate, r.stderr);
    }
    Ok(())
}
