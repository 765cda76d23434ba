//! Wedges between dual paths and meshes between forward paths: no net path
//! enters either. Also the mesh components above a time T.
//! Usage: `cargo run --release --example wedges_meshes [seed]`.

use bnet::classify::{any_net_path_enters, any_net_path_enters_from_outside, t_mesh_components, Mesh, Wedge};
use bnet::{sample_arrow_field, LatticeConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3);
    let field = sample_arrow_field(&LatticeConfig::new(0.3, -10, 10, 0, 10, seed).with_margin(11))?;

    let (mut wedges, mut entered) = (0, 0);
    for x_r in field.dual_row_sites(11).filter(|x| (-8..8).contains(x)) {
        let w = Wedge::new(&field, 11, x_r, x_r + 2)?;
        wedges += 1;
        if let Some(hit) = any_net_path_enters_from_outside(&field, &w) {
            entered += 1;
            println!("wedge at {x_r} entered: {hit:?}");
        }
    }
    println!("{wedges} wedges checked, {entered} entered");

    let (mut meshes, mut entered) = (0, 0);
    for t in 0..10 {
        for x in field.row_sites(t).filter(|x| (-8..=8).contains(x)) {
            if field.get(x, t).is_some_and(|a| a.is_both()) {
                let m = Mesh::at_separation(&field, (x, t))?;
                meshes += 1;
                if any_net_path_enters(&field, &m).is_some() {
                    entered += 1;
                }
            }
        }
    }
    println!("{meshes} meshes checked, {entered} entered");

    let comps = t_mesh_components(&field, 2)?;
    let closed = comps.iter().filter(|c| c.is_closed()).count();
    println!("{} cell components above T = 2, {closed} closed", comps.len());
    Ok(())
}
