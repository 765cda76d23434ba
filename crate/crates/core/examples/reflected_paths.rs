//! A right-most path reflected off a dual left-most path, and the hop
//! closure of the extremal paths from one site.
//! Usage: `cargo run --example reflected_paths [seed]`.

use bnet::oracle::{enumerate_paths, splice_closure};
use bnet::paths::{dual_leftmost, reflected_rightmost};
use bnet::{sample_arrow_field, LatticeConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(5);
    let field = sample_arrow_field(&LatticeConfig::new(0.4, -8, 8, 0, 8, seed).with_margin(9))?;

    let dual = dual_leftmost(&field, (4, 9))?;
    let refl = reflected_rightmost(&field, (0, 0), &dual)?;
    println!("dual left-most from (4,9): {:?}", dual.positions);
    println!("reflected right-most from (0,0): {:?}", refl.path.positions);
    println!("reflections at times {:?}", refl.reflection_times);

    let all = enumerate_paths(&field, (0, 0));
    let closure = splice_closure(&field, (0, 0))?;
    println!("{} net paths from (0,0); hop closure of the extremal pair has {}", all.len(), closure.len());
    Ok(())
}
