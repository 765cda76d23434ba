//! Structural invariants of arrow fields, checked exhaustively against the
//! brute-force oracles on small random windows.
//!
//! Every case has an inner window of at most 11×11 sites and a margin one
//! more than its height, so no forward or dual path started inside can leave
//! the stored window.
//! Because arrows are a pure function of `(seed, x, t)`, a failing case is
//! shrunk by trimming its window while keeping the seed.

use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{
    any_net_path_enters, any_net_path_enters_from_outside, census, check_component_walls, coalescence_sites,
    crossing_at, enters_from_outside, incoming_signature, mesh_entered, reachable_set, relevant_separation_points,
    t_mesh_components, IncomingType, Mesh, SiteKind, Wedge,
};
use crate::lattice::{sample_arrow_field, Arrow, ArrowField, LatticeConfig};
use crate::oracle;
use crate::paths::{
    dual_leftmost, dual_rightmost, first_meeting_time, hop_concatenate, is_dual_net_path, is_net_path, leftmost_path,
    reflected_rightmost, rightmost_path, LatticePath,
};
use crate::rng;

pub type CheckResult = std::result::Result<(), String>;

pub struct Check {
    pub name: &'static str,
    pub run: fn(&ArrowField) -> CheckResult,
}

pub const CHECKS: &[Check] = &[
    Check { name: "mirror-involution", run: mirror_involution },
    Check { name: "segment-non-crossing", run: segment_non_crossing },
    Check { name: "extremal-order", run: extremal_order },
    Check { name: "net-paths-vs-enumeration", run: net_paths_vs_enumeration },
    Check { name: "hop-closure", run: hop_closure },
    Check { name: "leftmost-coalescence", run: leftmost_coalescence },
    Check { name: "dual-non-crossing", run: dual_non_crossing },
    Check { name: "reachable-vs-enumeration", run: reachable_vs_enumeration },
    Check { name: "reflected-maximality", run: reflected_maximality },
    Check { name: "census", run: census_consistency },
    Check { name: "crossing-equals-separation", run: crossing_equals_separation },
    Check { name: "relevant-points", run: relevant_points },
    Check { name: "wedges-not-entered", run: wedges_not_entered },
    Check { name: "meshes-not-entered", run: meshes_not_entered },
    Check { name: "t-mesh-components", run: t_mesh_structure },
    Check { name: "incoming-signature", run: incoming_consistency },
];

fn inner_sites(field: &ArrowField) -> Vec<(i64, i64)> {
    let c = field.config();
    (c.t_lo..=c.t_hi)
        .flat_map(|t| (c.x_lo..=c.x_hi).filter(move |x| (x + t).rem_euclid(2) == 0).map(move |x| (x, t)))
        .collect()
}

fn inner_dual_sites(field: &ArrowField) -> Vec<(i64, i64)> {
    let c = field.config();
    (c.t_lo + 1..=c.t_hi + 1)
        .flat_map(|t| (c.x_lo..=c.x_hi).filter(move |x| (x + t).rem_euclid(2) == 1).map(move |x| (x, t)))
        .collect()
}

fn err<T: std::fmt::Display>(e: T) -> String {
    e.to_string()
}

fn mirror_involution(field: &ArrowField) -> CheckResult {
    for t in field.t_lo()..=field.t_hi() {
        for x in field.row_sites(t) {
            let a = field.get(x, t).unwrap();
            let d = field.get_dual(x, t + 1).ok_or(format!("no dual site above ({x},{t})"))?;
            if d != a.mirror() || d.mirror() != a || d.is_both() != a.is_both() {
                return Err(format!("({x},{t}): forward {a:?}, dual {d:?}"));
            }
        }
    }
    Ok(())
}

/// Do the closed segments `p0-p1` and `q0-q1` share a point?
fn segments_meet(p0: (i64, i64), p1: (i64, i64), q0: (i64, i64), q1: (i64, i64)) -> bool {
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let on = |a: (i64, i64), b: (i64, i64), p: (i64, i64)| {
        p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
    };
    let (d1, d2) = (cross(q0, q1, p0), cross(q0, q1, p1));
    let (d3, d4) = (cross(p0, p1, q0), cross(p0, p1, q1));
    if ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)) {
        return true;
    }
    (d1 == 0 && on(q0, q1, p0))
        || (d2 == 0 && on(q0, q1, p1))
        || (d3 == 0 && on(p0, p1, q0))
        || (d4 == 0 && on(p0, p1, q1))
}

fn arrows_of(a: Arrow) -> Vec<i64> {
    let mut v = Vec::new();
    if a.has_left() {
        v.push(-1);
    }
    if a.has_right() {
        v.push(1);
    }
    v
}

fn segment_non_crossing(field: &ArrowField) -> CheckResult {
    for t in field.t_lo()..field.t_hi() {
        for x in field.row_sites(t) {
            let a = field.get(x, t).unwrap();
            for dx in arrows_of(a) {
                let (p0, p1) = ((x, t), (x + dx, t + 1));
                for y in [x - 2, x, x + 2] {
                    let Some(d) = field.get_dual(y, t + 1) else { continue };
                    for dy in arrows_of(d) {
                        if segments_meet(p0, p1, (y, t + 1), (y + dy, t)) {
                            let own = y == x && a.is_both();
                            if !own {
                                return Err(format!("forward ({x},{t})->{dx:+} meets dual ({y},{})->{dy:+}", t + 1));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn extremal_order(field: &ArrowField) -> CheckResult {
    for z in inner_sites(field) {
        let l = leftmost_path(field, z).map_err(err)?;
        let r = rightmost_path(field, z).map_err(err)?;
        for p in oracle::enumerate_paths(field, z) {
            for (t, x) in p.points() {
                let (lx, rx) = (l.at(t).unwrap(), r.at(t).unwrap());
                if !(lx <= x && x <= rx) {
                    return Err(format!("path from {z:?} at time {t}: {x} outside [{lx}, {rx}]"));
                }
            }
        }
    }
    Ok(())
}

fn net_paths_vs_enumeration(field: &ArrowField) -> CheckResult {
    for z in inner_sites(field) {
        let by_arrows: BTreeSet<Vec<i64>> =
            oracle::enumerate_paths(field, z).into_iter().map(|p| p.positions).collect();
        let accepted: BTreeSet<Vec<i64>> = oracle::all_step_paths(field, z)
            .into_iter()
            .filter(|p| is_net_path(field, p))
            .map(|p| p.positions)
            .collect();
        if by_arrows != accepted {
            return Err(format!("from {z:?}: {} enumerated, {} accepted", by_arrows.len(), accepted.len()));
        }
        let spliced = oracle::splice_closure(field, z).map_err(err)?;
        if spliced != by_arrows {
            return Err(format!(
                "from {z:?}: hop closure has {} paths, enumeration {}",
                spliced.len(),
                by_arrows.len()
            ));
        }
    }
    Ok(())
}

fn hop_closure(field: &ArrowField) -> CheckResult {
    let c = field.config();
    let row: Vec<(i64, i64)> =
        (c.x_lo..=c.x_hi).filter(|x| (x + c.t_lo).rem_euclid(2) == 0).map(|x| (x, c.t_lo)).collect();
    let mut paths: Vec<LatticePath> = Vec::new();
    for &z in &row {
        paths.extend(oracle::enumerate_paths(field, z).into_iter().take(8));
    }
    for p in &paths {
        for q in &paths {
            for t in p.start_time.max(q.start_time) + 1..=p.end_time().min(q.end_time()) {
                if p.at(t) == q.at(t) {
                    let h = hop_concatenate(p, q, t).map_err(err)?;
                    if !is_net_path(field, &h) {
                        return Err(format!(
                            "hop at {t} of {:?} onto {:?} is not a net path",
                            p.positions, q.positions
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

fn leftmost_coalescence(field: &ArrowField) -> CheckResult {
    let c = field.config();
    let starts: Vec<(i64, i64)> = inner_sites(field).into_iter().filter(|z| z.1 == c.t_lo).collect();
    let paths: Vec<LatticePath> =
        starts.iter().map(|&z| leftmost_path(field, z)).collect::<crate::Result<_>>().map_err(err)?;
    for (i, p) in paths.iter().enumerate() {
        for q in &paths[i + 1..] {
            if let Some(m) = first_meeting_time(p, q).map_err(err)? {
                for t in m..=p.end_time().min(q.end_time()) {
                    if p.at(t) != q.at(t) {
                        return Err(format!("left-most paths met at {m} and split at {t}"));
                    }
                }
            }
            for t in p.start_time..=p.end_time().min(q.end_time()) {
                if (p.at(t).unwrap() - q.at(t).unwrap()).signum() != (p.positions[0] - q.positions[0]).signum()
                    && p.at(t) != q.at(t)
                {
                    return Err(format!("left-most paths swapped order at {t}"));
                }
            }
        }
    }
    Ok(())
}

/// Times `t` at which `fwd` and `dual` are strictly ordered one way at `t`
/// and the other way at `t + 1`, with the forward site `(fwd(t), t)`.
fn order_swaps(fwd: &LatticePath, dual: &crate::paths::DualLatticePath) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let lo = fwd.start_time.max(dual.end_time());
    let hi = fwd.end_time().min(dual.start_time);
    for t in lo..hi {
        let (f0, f1) = (fwd.at(t).unwrap(), fwd.at(t + 1).unwrap());
        let (d0, d1) = (dual.at(t).unwrap(), dual.at(t + 1).unwrap());
        if (f0 < d0) != (f1 < d1) {
            out.push((f0, t));
        }
    }
    out
}

fn dual_non_crossing(field: &ArrowField) -> CheckResult {
    let duals: Vec<_> = inner_dual_sites(field)
        .into_iter()
        .map(|z| dual_leftmost(field, z))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(err)?;
    for d in &duals {
        if !is_dual_net_path(field, d) {
            return Err(format!(
                "dual left-most path from ({},{}) is not a dual net path",
                d.positions[0], d.start_time
            ));
        }
    }
    for z in inner_sites(field) {
        let l = leftmost_path(field, z).map_err(err)?;
        let r = rightmost_path(field, z).map_err(err)?;
        for d in &duals {
            if let Some(s) = order_swaps(&l, d).first() {
                return Err(format!("left-most path from {z:?} crosses a dual left-most path at {s:?}"));
            }
            for (x, t) in order_swaps(&r, d) {
                if !field.get(x, t).unwrap().is_both() {
                    return Err(format!(
                        "right-most path from {z:?} crosses a dual left-most path at plain site ({x},{t})"
                    ));
                }
            }
        }
    }
    Ok(())
}

fn reachable_vs_enumeration(field: &ArrowField) -> CheckResult {
    let s = field.t_lo();
    let xi = reachable_set(field, s).map_err(err)?;
    let mut fast = BTreeSet::new();
    for t in xi.times() {
        fast.extend(xi.positions(t).into_iter().map(|x| (x, t)));
    }
    let slow = oracle::reachable_by_enumeration(field, s);
    if fast != slow {
        let diff: Vec<_> = fast.symmetric_difference(&slow).take(4).collect();
        return Err(format!("reachable set differs from enumeration at {diff:?}"));
    }
    Ok(())
}

fn reflected_maximality(field: &ArrowField) -> CheckResult {
    let c = field.config();
    let mut duals = Vec::new();
    for (x, t) in inner_dual_sites(field) {
        if t == c.t_hi + 1 || (x + t) % 3 == 0 {
            duals.push(dual_leftmost(field, (x, t)).map_err(err)?);
            duals.push(dual_rightmost(field, (x, t)).map_err(err)?);
        }
    }
    for d in &duals {
        for z in inner_sites(field) {
            if z.1 > d.start_time || z.1 < d.end_time() {
                continue;
            }
            let oracle_max = oracle::reflected_max_by_enumeration(field, z, d);
            let got = reflected_rightmost(field, z, d);
            match (got, oracle_max) {
                (Err(_), None) => {}
                (Ok(rp), Some(max)) => {
                    if rp.path.positions != max {
                        return Err(format!(
                            "reflected path from {z:?} off dual from ({},{}): {:?}, enumeration max {:?}",
                            d.positions[0], d.start_time, rp.path.positions, max
                        ));
                    }
                    if !is_net_path(field, &rp.path) {
                        return Err(format!("reflected path from {z:?} is not a net path"));
                    }
                    let mut seg_start = z.1;
                    let mut cuts = rp.reflection_times.clone();
                    cuts.push(rp.path.end_time());
                    for &rt in &cuts {
                        if rt != rp.path.end_time() && !field.get(rp.path.at(rt).unwrap(), rt).unwrap().is_both() {
                            return Err(format!("reflection at plain site, time {rt}"));
                        }
                        let seg = rightmost_path(field, (rp.path.at(seg_start).unwrap(), seg_start)).map_err(err)?;
                        for t in seg_start..=rt {
                            if seg.at(t) != rp.path.at(t) {
                                return Err(format!("segment from {seg_start} leaves the right-most path at {t}"));
                            }
                        }
                        seg_start = rt + 1;
                    }
                }
                (Ok(rp), None) => {
                    return Err(format!("reflected path {:?} from {z:?} but no admissible path", rp.path.positions))
                }
                (Err(e), Some(_)) => return Err(format!("reflected path from {z:?} failed ({e}) though paths exist")),
            }
        }
    }
    Ok(())
}

fn census_consistency(field: &ArrowField) -> CheckResult {
    let rows = census(field).map_err(err)?;
    let expected = inner_sites(field).len();
    if rows.len() != expected {
        return Err(format!("census has {} rows, window has {expected} sites", rows.len()));
    }
    let xi = reachable_set(field, field.t_lo()).map_err(err)?;
    for r in &rows {
        let a = field.get(r.x, r.t).unwrap();
        if (r.kind == SiteKind::Separation) != a.is_both() {
            return Err(format!("({},{}) tagged {:?} with arrows {a:?}", r.x, r.t, r.kind));
        }
        if r.kind == SiteKind::Meeting && r.m_in != 2 {
            return Err(format!("meeting site ({},{}) has m_in {}", r.x, r.t, r.m_in));
        }
        if r.m_in == 2 && !a.is_both() && r.kind != SiteKind::Meeting {
            return Err(format!("({},{}) has two incoming walkers but is {:?}", r.x, r.t, r.kind));
        }
        if r.kind == SiteKind::Meeting && r.t < field.t_hi() {
            // exactly one outgoing arrow is occupied afterwards
            let next: Vec<i64> = arrows_of(a).into_iter().filter(|dx| xi.contains(r.x + dx, r.t + 1)).collect();
            if r.m_out != 1 || next.len() != 1 {
                return Err(format!("meeting site ({},{}) has {} occupied outgoing arrows", r.x, r.t, next.len()));
            }
        }
        if r.m_in > 0 && !xi.contains(r.x, r.t) {
            return Err(format!("({},{}) has incoming walkers but is unoccupied", r.x, r.t));
        }
    }
    Ok(())
}

fn crossing_equals_separation(field: &ArrowField) -> CheckResult {
    let xi = reachable_set(field, field.t_lo()).map_err(err)?;
    let mut swaps = BTreeSet::new();
    let duals: Vec<_> = inner_dual_sites(field)
        .into_iter()
        .map(|z| dual_leftmost(field, z))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(err)?;
    let occupied: Vec<(i64, i64)> = inner_sites(field).into_iter().filter(|&(x, t)| xi.contains(x, t)).collect();
    for &z in &occupied {
        let r = rightmost_path(field, z).map_err(err)?;
        for d in &duals {
            swaps.extend(order_swaps(&r, d).into_iter().filter(|&(x, t)| {
                x >= field.config().x_lo && x <= field.config().x_hi && t < field.t_hi() && xi.contains(x, t)
            }));
        }
    }
    let both: BTreeSet<(i64, i64)> =
        occupied.iter().copied().filter(|&(x, t)| t < field.t_hi() && field.get(x, t).unwrap().is_both()).collect();
    if swaps != both {
        return Err(format!("crossing sites {swaps:?} differ from occupied branching sites {both:?}"));
    }
    for &(x, t) in &occupied {
        if crossing_at(field, x, t) != Some(field.get(x, t).unwrap().is_both()) {
            return Err(format!("crossing flag wrong at ({x},{t})"));
        }
    }
    Ok(())
}

/// Direct translation of the definition, used against the fast routine.
fn relevant_by_definition(field: &ArrowField, s: i64, u: i64) -> crate::Result<BTreeSet<(i64, i64)>> {
    let reach = oracle::reachable_by_enumeration(field, s);
    let mut out = BTreeSet::new();
    for &(x, t) in &reach {
        if t <= s || t >= u || !field.get(x, t).unwrap().is_both() {
            continue;
        }
        let l = leftmost_path(field, (x, t))?.truncated(u);
        let r = rightmost_path(field, (x, t))?.truncated(u);
        match first_meeting_time(&l, &r)? {
            Some(m) if m < u => {}
            _ => {
                out.insert((x, t));
            }
        }
    }
    Ok(out)
}

fn relevant_points(field: &ArrowField) -> CheckResult {
    let (lo, hi) = (field.t_lo(), field.t_hi());
    let c = field.config();
    let inner = |z: &(i64, i64)| z.0 >= c.x_lo && z.0 <= c.x_hi;
    let mut sets = Vec::new();
    for s in lo..hi {
        for u in s + 1..=hi {
            let fast = relevant_separation_points(field, s, u).map_err(err)?;
            let fast: BTreeSet<(i64, i64)> = fast.sites.into_iter().filter(inner).collect();
            let slow: BTreeSet<(i64, i64)> =
                relevant_by_definition(field, s, u).map_err(err)?.into_iter().filter(inner).collect();
            if fast != slow {
                return Err(format!("R_({s},{u}): fast {fast:?}, definition {slow:?}"));
            }
            if u == s + 1 && !fast.is_empty() {
                return Err(format!("R_({s},{u}) should be empty"));
            }
            sets.push((s, u, fast));
        }
    }
    // R_{s',u'} restricted to (s,u) is contained in R_{s,u} when s' <= s < u <= u'.
    for (s1, u1, big) in &sets {
        for (s, u, small) in &sets {
            if s1 <= s && u <= u1 {
                for z in big.iter().filter(|z| z.1 > *s && z.1 < *u) {
                    if !small.contains(z) {
                        return Err(format!("{z:?} is ({s1},{u1})-relevant but not ({s},{u})-relevant"));
                    }
                }
            }
        }
    }
    Ok(())
}

fn wedges_not_entered(field: &ArrowField) -> CheckResult {
    let duals = inner_dual_sites(field);
    for (i, &(xr, t)) in duals.iter().enumerate() {
        for &(xl, t2) in &duals[i + 1..] {
            if t2 != t || xl <= xr {
                continue;
            }
            let w = Wedge::new(field, t, xr, xl).map_err(err)?;
            if let Some((z, dx)) = any_net_path_enters_from_outside(field, &w) {
                return Err(format!("arrow {z:?}->{dx:+} enters the wedge below ({xr},{t})-({xl},{t})"));
            }
            for z in inner_sites(field).into_iter().filter(|z| (z.0 + z.1) % 5 == 0) {
                for p in oracle::enumerate_paths(field, z) {
                    if enters_from_outside(&p, &w) {
                        return Err(format!("path {:?} enters the wedge below ({xr},{t})-({xl},{t})", p.positions));
                    }
                }
            }
        }
    }
    Ok(())
}

fn meshes_not_entered(field: &ArrowField) -> CheckResult {
    for (x, t) in inner_sites(field) {
        if t >= field.t_hi() || !field.get(x, t).unwrap().is_both() {
            continue;
        }
        let m = Mesh::at_separation(field, (x, t)).map_err(err)?;
        if !is_net_path(field, &m.r) || !is_net_path(field, &m.l) {
            return Err(format!("mesh walls at ({x},{t}) are not net paths"));
        }
        if let Some((z, dx)) = any_net_path_enters(field, &m) {
            return Err(format!("arrow {z:?}->{dx:+} enters the mesh at ({x},{t})"));
        }
        for z in inner_sites(field).into_iter().filter(|z| z.1 <= t + 1) {
            for p in oracle::enumerate_paths(field, z) {
                if mesh_entered(&p, &m) {
                    return Err(format!("path {:?} enters the mesh at ({x},{t})", p.positions));
                }
            }
        }
    }
    Ok(())
}

fn t_mesh_structure(field: &ArrowField) -> CheckResult {
    let big_t = field.t_lo();
    let comps = t_mesh_components(field, big_t).map_err(err)?;
    let coal: BTreeSet<(i64, i64)> = coalescence_sites(field, big_t).map_err(err)?.into_iter().collect();
    let mut tops = BTreeSet::new();
    let mut owner = std::collections::BTreeMap::new();
    for (i, c) in comps.iter().enumerate() {
        for &cell in &c.cells {
            owner.insert(cell, i);
        }
        if !c.is_closed() {
            continue;
        }
        let top = c.top_site.unwrap();
        if !tops.insert(top) {
            return Err(format!("two components close at {top:?}"));
        }
        if !coal.contains(&top) {
            return Err(format!("component closes at {top:?}, which is not a coalescence site"));
        }
        let (l, r) = check_component_walls(field, c).map_err(err)?;
        if !is_net_path(field, &l) || !is_net_path(field, &r) {
            return Err(format!("walls of the component closing at {top:?} are not net paths"));
        }
    }
    // The cell just below a coalescence site is closed from above there.
    for &(x, t) in &coal {
        if let Some(&i) = owner.get(&(x, t - 1)) {
            if comps[i].is_closed() && comps[i].top_site != Some((x, t)) {
                return Err(format!("coalescence at ({x},{t}) is not the top of the component below it"));
            }
        }
    }
    Ok(())
}

fn incoming_consistency(field: &ArrowField) -> CheckResult {
    let rows = census(field).map_err(err)?;
    let height = field.t_hi() - field.t_lo();
    let xi = reachable_set(field, field.t_lo()).map_err(err)?;
    for r in rows {
        let sig = incoming_signature(field, (r.x, r.t), height.max(1)).map_err(err)?;
        let expect = if r.t == field.t_lo() || !xi.contains(r.x, r.t) {
            IncomingType::Co
        } else if r.kind == SiteKind::Separation {
            IncomingType::Cs
        } else if r.m_in == 2 {
            IncomingType::Cm
        } else {
            IncomingType::Cp
        };
        if sig != expect {
            return Err(format!("({},{}) classified {sig:?}, census implies {expect:?}", r.x, r.t));
        }
    }
    Ok(())
}

/// Run every check on one field; the first failure of each check is kept.
pub fn check_field(field: &ArrowField) -> Vec<(&'static str, String)> {
    CHECKS.iter().filter_map(|c| (c.run)(field).err().map(|e| (c.name, e))).collect()
}

/// A random case: inner window at most 11×11 sites, margin one more than its height.
pub fn random_case(rng: &mut impl Rng, epsilon: f64) -> LatticeConfig {
    let half_width = rng.random_range(1..=5i64);
    let height = rng.random_range(1..=10i64);
    let x_lo = rng.random_range(-6..=6i64);
    let t_lo = rng.random_range(-4..=4i64);
    LatticeConfig::new(epsilon, x_lo, x_lo + 2 * half_width, t_lo, t_lo + height, rng.random()).with_margin(height + 1)
}

/// Trim the window of a failing case while `check` keeps failing.
pub fn shrink(config: &LatticeConfig, check: &Check) -> LatticeConfig {
    let fails = |c: &LatticeConfig| {
        let c = c.clone().with_margin(c.t_hi - c.t_lo + 1);
        sample_arrow_field(&c).map(|f| (check.run)(&f).is_err()).unwrap_or(false)
    };
    let mut best = config.clone();
    loop {
        let mut candidates = Vec::new();
        let b = &best;
        if b.t_hi - b.t_lo > 1 {
            candidates.push(LatticeConfig { t_hi: b.t_hi - 1, ..b.clone() });
            candidates.push(LatticeConfig { t_lo: b.t_lo + 1, ..b.clone() });
        }
        if b.x_hi - b.x_lo > 2 {
            candidates.push(LatticeConfig { x_hi: b.x_hi - 2, ..b.clone() });
            candidates.push(LatticeConfig { x_lo: b.x_lo + 2, ..b.clone() });
        }
        match candidates.into_iter().find(|c| fails(c)) {
            Some(c) => best = c,
            None => break,
        }
    }
    let margin = best.t_hi - best.t_lo + 1;
    best.with_margin(margin)
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub check: &'static str,
    pub detail: String,
    pub original: LatticeConfig,
    pub shrunk: LatticeConfig,
    pub dump: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub cases: usize,
    pub epsilons: Vec<f64>,
    pub seed: u64,
    pub checks: Vec<&'static str>,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Run the suite on `cases` random windows, cycling through `epsilons`.
pub fn run_suite(cases: usize, epsilons: &[f64], seed: u64) -> crate::Result<SuiteReport> {
    if epsilons.is_empty() {
        return Err(crate::Error::InvalidConfig("need at least one epsilon".into()));
    }
    let results: Vec<crate::Result<Vec<Failure>>> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::replicate_rng(seed, i as u64);
            let config = random_case(&mut r, epsilons[i % epsilons.len()]);
            let field = sample_arrow_field(&config)?;
            Ok(check_field(&field)
                .into_iter()
                .map(|(name, detail)| {
                    let check = CHECKS.iter().find(|c| c.name == name).unwrap();
                    let shrunk = shrink(&config, check);
                    let dump = sample_arrow_field(&shrunk).map(|f| f.dump()).unwrap_or_default();
                    Failure { check: name, detail, original: config.clone(), shrunk, dump }
                })
                .collect())
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        failures.extend(r?);
    }
    Ok(SuiteReport {
        cases,
        epsilons: epsilons.to_vec(),
        seed,
        checks: CHECKS.iter().map(|c| c.name).collect(),
        failures,
    })
}
