//! Sample an arrow field, print it, and follow the extremal paths of one site.
//! Usage: `cargo run --example sample_field [epsilon] [seed]`.

use bnet::paths::{leftmost_path, rightmost_path};
use bnet::{sample_arrow_field, LatticeConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let epsilon: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.3);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);

    let field = sample_arrow_field(&LatticeConfig::new(epsilon, -12, 12, 0, 12, seed))?;
    print!("{}", field.dump());

    let l = leftmost_path(&field, (0, 0))?;
    let r = rightmost_path(&field, (0, 0))?;
    println!("left-most from (0,0):  {:?}", l.positions);
    println!("right-most from (0,0): {:?}", r.positions);

    // The dump round-trips.
    let again = bnet::ArrowField::parse_dump(&field.dump())?;
    assert_eq!(again.dump(), field.dump());
    Ok(())
}
