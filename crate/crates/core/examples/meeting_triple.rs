//! Meeting triple started from `(X, Y) = (ε, 0)`: probability that `X`
//! catches `Y` while `Y` sits at 0, for decreasing ε, and the stopped
//! supermartingale profile.
//! Usage: `cargo run --release --example meeting_triple [reps]`.

use bnet::sde::{meeting_absorption_estimate, supermartingale_profile, TripleConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reps: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4000);
    for eps in [0.4, 0.2, 0.1, 0.05] {
        let start = std::time::Instant::now();
        let (r, censored) = meeting_absorption_estimate(&TripleConfig::scaled(eps), reps, 7)?;
        println!(
            "eps = {eps:<5} P[Y_tau = 0] = {:.4} ± {:.4}  ({censored} censored, {:.1}s)",
            r.estimate,
            r.stderr,
            start.elapsed().as_secs_f64()
        );
    }
    let times = [0.0, 0.005, 0.01, 0.02, 0.04];
    let prof = supermartingale_profile(0.3, 1e-5, &times, reps, 8)?;
    for (t, r) in times.iter().zip(&prof) {
        println!("E[(g+f)(X,Y) stopped] at t = {t:<6} {:.4} ± {:.4}", r.estimate, r.stderr);
    }
    Ok(())
}
