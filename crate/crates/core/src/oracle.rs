//! Brute-force references for small windows. Everything here is exponential
//! in the window size and meant for tests and the invariant suite.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lattice::{Arrow, ArrowField, LatticeConfig};
use crate::paths::{hop_concatenate, leftmost_path, rightmost_path, DualLatticePath, LatticePath};

/// Every arrow-following path from `z` up to the top of the window.
pub fn enumerate_paths(field: &ArrowField, z: (i64, i64)) -> Vec<LatticePath> {
    fn rec(field: &ArrowField, t0: i64, cur: &mut Vec<i64>, out: &mut Vec<LatticePath>) {
        let t = t0 + cur.len() as i64 - 1;
        let x = *cur.last().unwrap();
        if t == field.t_hi() {
            out.push(LatticePath { start_time: t0, positions: cur.clone(), tainted: false });
            return;
        }
        let a = field.get(x, t).unwrap();
        let mut any = false;
        for (ok, nx) in [(a.has_left(), x - 1), (a.has_right(), x + 1)] {
            if ok && field.contains(nx, t + 1) {
                any = true;
                cur.push(nx);
                rec(field, t0, cur, out);
                cur.pop();
            }
        }
        if !any {
            out.push(LatticePath { start_time: t0, positions: cur.clone(), tainted: true });
        }
    }
    let mut out = Vec::new();
    if field.contains(z.0, z.1) {
        rec(field, z.1, &mut vec![z.0], &mut out);
    }
    out
}

/// Every ±1 path from `z` to the top of the window that stays inside it,
/// ignoring arrows.
pub fn all_step_paths(field: &ArrowField, z: (i64, i64)) -> Vec<LatticePath> {
    let mut out = Vec::new();
    let mut stack = vec![vec![z.0]];
    while let Some(cur) = stack.pop() {
        let t = z.1 + cur.len() as i64 - 1;
        if t == field.t_hi() {
            out.push(LatticePath { start_time: z.1, positions: cur, tainted: false });
            continue;
        }
        let x = *cur.last().unwrap();
        for nx in [x - 1, x + 1] {
            if field.contains(nx, t + 1) {
                let mut next = cur.clone();
                next.push(nx);
                stack.push(next);
            }
        }
    }
    out
}

/// Closure of `{l_z, r_z}` under hopping onto the left-most and right-most
/// paths of every later site of every path in the set.
pub fn splice_closure(field: &ArrowField, z: (i64, i64)) -> Result<BTreeSet<Vec<i64>>> {
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut todo = vec![leftmost_path(field, z)?, rightmost_path(field, z)?];
    while let Some(p) = todo.pop() {
        if !seen.insert(p.positions.clone()) {
            continue;
        }
        for t in p.start_time + 1..p.end_time() {
            let x = p.at(t).unwrap();
            for q in [leftmost_path(field, (x, t))?, rightmost_path(field, (x, t))?] {
                // The hop needs `t > σ_q`; start q one step back along p instead.
                let q = LatticePath {
                    start_time: t - 1,
                    positions: std::iter::once(p.at(t - 1).unwrap()).chain(q.positions).collect(),
                    tainted: q.tainted,
                };
                let h = hop_concatenate(&p, &q, t)?;
                if !seen.contains(&h.positions) {
                    todo.push(h);
                }
            }
        }
    }
    Ok(seen)
}

/// `ξ^{(s)}` by explicit path enumeration: `(x, t)` pairs visited by some
/// net path started on row `s`.
pub fn reachable_by_enumeration(field: &ArrowField, s: i64) -> BTreeSet<(i64, i64)> {
    let mut out = BTreeSet::new();
    for x in field.row_sites(s) {
        for p in enumerate_paths(field, (x, s)) {
            out.extend(p.points().map(|(t, x)| (x, t)));
        }
    }
    out
}

/// Is `path` left of `dual` (`π(s) <= π̂(s) - 1`) wherever both exist up
/// to the dual start time?
pub fn stays_left_of(path: &LatticePath, dual: &DualLatticePath) -> bool {
    path.points().filter(|&(t, _)| t <= dual.start_time).all(|(t, x)| dual.at(t).is_none_or(|d| x < d))
}

/// Pointwise maximum of all full-height net paths from `z` that stay left
/// of `dual`; `None` when there is none.
pub fn reflected_max_by_enumeration(field: &ArrowField, z: (i64, i64), dual: &DualLatticePath) -> Option<Vec<i64>> {
    let admissible: Vec<LatticePath> =
        enumerate_paths(field, z).into_iter().filter(|p| !p.tainted && stays_left_of(p, dual)).collect();
    let first = admissible.first()?;
    let mut max = first.positions.clone();
    for p in &admissible[1..] {
        for (m, &x) in max.iter_mut().zip(&p.positions) {
            *m = (*m).max(x);
        }
    }
    Some(max)
}

/// Exact mean number of occupied sites on the top row when walkers start
/// from every site of the bottom row, summing over all arrow assignments
/// of the rows below the top. The window must have at most 14 such sites.
pub fn exact_mean_occupancy(config: &LatticeConfig) -> Result<f64> {
    config.validate()?;
    let (x_lo, x_hi) = (config.x_lo, config.x_hi);
    let sites: Vec<(i64, i64)> = (config.t_lo..config.t_hi)
        .flat_map(|t| (x_lo..=x_hi).filter(move |x| (x + t).rem_euclid(2) == 0).map(move |x| (x, t)))
        .collect();
    if sites.len() > 14 {
        return Err(Error::Capacity { needed: 3u128.saturating_pow(sites.len() as u32), limit: 3u128.pow(14) });
    }
    let eps = config.epsilon;
    let choices = [(Arrow::LeftOnly, (1.0 - eps) / 2.0), (Arrow::RightOnly, (1.0 - eps) / 2.0), (Arrow::Both, eps)];
    let width = (x_hi - x_lo + 1) as usize;
    let mut total = 0.0;
    let mut assign = vec![0usize; sites.len()];
    loop {
        let weight: f64 = assign.iter().map(|&c| choices[c].1).product();
        if weight > 0.0 {
            let mut occ = vec![false; width];
            for x in (x_lo..=x_hi).filter(|x| (x + config.t_lo).rem_euclid(2) == 0) {
                occ[(x - x_lo) as usize] = true;
            }
            let arrows: Vec<((i64, i64), Arrow)> =
                sites.iter().zip(&assign).map(|(&z, &c)| (z, choices[c].0)).collect();
            for row in arrows.chunk_by(|a, b| a.0 .1 == b.0 .1) {
                let mut next = vec![false; width];
                for &((x, _), a) in row {
                    if occ[(x - x_lo) as usize] {
                        if a.has_left() && x > x_lo {
                            next[(x - 1 - x_lo) as usize] = true;
                        }
                        if a.has_right() && x < x_hi {
                            next[(x + 1 - x_lo) as usize] = true;
                        }
                    }
                }
                occ = next;
            }
            total += weight * occ.iter().filter(|&&b| b).count() as f64;
        }
        let mut i = 0;
        loop {
            if i == assign.len() {
                return Ok(total);
            }
            assign[i] += 1;
            if assign[i] < 3 {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}
