//! Site census of a field: how often each lattice-resolvable type occurs,
//! and a check that crossing sites are exactly the separation sites.
//! Usage: `cargo run --release --example census [epsilon] [seed]`.

use std::collections::BTreeMap;

use bnet::classify::{census, SiteKind};
use bnet::{sample_arrow_field, LatticeConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let epsilon: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.2);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let config = LatticeConfig::new(epsilon, -60, 60, 0, 40, seed).with_margin(41);
    let rows = census(&sample_arrow_field(&config)?)?;
    let mut counts: BTreeMap<SiteKind, usize> = BTreeMap::new();
    for r in &rows {
        *counts.entry(r.kind).or_default() += 1;
    }
    println!("{} sites classified", rows.len());
    for (kind, n) in &counts {
        println!("  {:<10} {n}", kind.as_str());
    }
    let crossing = rows.iter().filter(|r| r.crossing).count();
    let mismatched = rows.iter().filter(|r| r.crossing != (r.kind == SiteKind::Separation)).count();
    println!("crossing sites: {crossing}, mismatches with separation: {mismatched}");
    Ok(())
}
