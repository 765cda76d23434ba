//! Run the structural invariant suite on random small windows and print a
//! per-check summary. Usage: `cargo run --release --example invariant_suite [cases] [seed]`.

use bnet::invariants::run_suite;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let cases: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(500);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let start = std::time::Instant::now();
    let report = run_suite(cases, &[0.0, 0.1, 0.5, 1.0], seed)?;
    println!("{} cases, {} checks each, {:.1}s", report.cases, report.checks.len(), start.elapsed().as_secs_f64());
    for f in &report.failures {
        println!("FAIL {}: {}", f.check, f.detail);
        println!("  shrunk to {:?}", f.shrunk);
        print!("{}", f.dump);
    }
    if report.passed() {
        println!("all invariants hold");
    }
    Ok(())
}
