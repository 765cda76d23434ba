//! Lattice paths: extremal forward and dual paths, net-path membership,
//! hopping, paths reflected off a dual path, diffusive rescaling and the
//! path-space metrics.
//!
//! Contact convention: at an integer time a forward path (even parity) and a
//! dual path (odd parity) differ by an odd amount. "Left of" means
//! `π(s) <= π̂(s) - 1`; contact is equality.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::ArrowField;

/// A forward path: `positions[k]` is the position at time `start_time + k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePath {
    pub start_time: i64,
    pub positions: Vec<i64>,
    /// The path was cut short because its next step left the stored window.
    #[serde(default)]
    pub tainted: bool,
}

impl LatticePath {
    /// Validated constructor: unit steps and even parity.
    pub fn new(start_time: i64, positions: Vec<i64>) -> Result<LatticePath> {
        if positions.is_empty() {
            return Err(Error::Precondition("a path needs at least one position".into()));
        }
        for (k, &x) in positions.iter().enumerate() {
            let t = start_time + k as i64;
            if (x + t).rem_euclid(2) != 0 {
                return Err(Error::Parity { x, t });
            }
            if k > 0 && (x - positions[k - 1]).abs() != 1 {
                return Err(Error::Precondition(format!("non-unit step into ({x},{t})")));
            }
        }
        Ok(LatticePath { start_time, positions, tainted: false })
    }

    pub fn end_time(&self) -> i64 {
        self.start_time + self.positions.len() as i64 - 1
    }

    pub fn at(&self, t: i64) -> Option<i64> {
        if t < self.start_time {
            return None;
        }
        self.positions.get((t - self.start_time) as usize).copied()
    }

    pub fn start(&self) -> (i64, i64) {
        (self.positions[0], self.start_time)
    }

    /// `(t, x)` pairs in time order.
    pub fn points(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.positions.iter().enumerate().map(move |(k, &x)| (self.start_time + k as i64, x))
    }

    /// Restriction to `[start_time, t]`.
    pub fn truncated(&self, t: i64) -> LatticePath {
        let n = ((t - self.start_time + 1).max(1) as usize).min(self.positions.len());
        LatticePath { start_time: self.start_time, positions: self.positions[..n].to_vec(), tainted: false }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x\n");
        for (t, x) in self.points() {
            let _ = writeln!(s, "{t},{x}");
        }
        s
    }

    /// Diffusively rescaled, piecewise-linear version.
    pub fn rescaled(&self, epsilon: f64) -> ContinuumPath {
        ContinuumPath {
            knots: self.points().map(|(t, x)| (epsilon * epsilon * t as f64, epsilon * x as f64)).collect(),
        }
    }
}

/// A dual path: `positions[k]` is the position at time `start_time - k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualLatticePath {
    pub start_time: i64,
    pub positions: Vec<i64>,
    #[serde(default)]
    pub tainted: bool,
}

impl DualLatticePath {
    pub fn new(start_time: i64, positions: Vec<i64>) -> Result<DualLatticePath> {
        if positions.is_empty() {
            return Err(Error::Precondition("a path needs at least one position".into()));
        }
        for (k, &x) in positions.iter().enumerate() {
            let t = start_time - k as i64;
            if (x + t).rem_euclid(2) != 1 {
                return Err(Error::Parity { x, t });
            }
            if k > 0 && (x - positions[k - 1]).abs() != 1 {
                return Err(Error::Precondition(format!("non-unit step into ({x},{t})")));
            }
        }
        Ok(DualLatticePath { start_time, positions, tainted: false })
    }

    /// Last (lowest) time the path is defined.
    pub fn end_time(&self) -> i64 {
        self.start_time - self.positions.len() as i64 + 1
    }

    pub fn at(&self, t: i64) -> Option<i64> {
        if t > self.start_time {
            return None;
        }
        self.positions.get((self.start_time - t) as usize).copied()
    }

    pub fn points(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.positions.iter().enumerate().map(move |(k, &x)| (self.start_time - k as i64, x))
    }
}

fn extremal(field: &ArrowField, x: i64, t: i64, prefer_right: bool) -> Result<LatticePath> {
    if (x + t).rem_euclid(2) != 0 {
        return Err(Error::Parity { x, t });
    }
    if !field.contains(x, t) {
        return Err(Error::OutOfWindow { x, t });
    }
    let start = t;
    let mut positions = vec![x];
    let mut tainted = false;
    let (mut x, mut t) = (x, t);
    while t < field.t_hi() {
        let a = field.get(x, t).unwrap();
        let go_right = if prefer_right { a.has_right() } else { !a.has_left() };
        let nx = if go_right { x + 1 } else { x - 1 };
        if !field.contains(nx, t + 1) {
            tainted = true;
            break;
        }
        positions.push(nx);
        x = nx;
        t += 1;
    }
    Ok(LatticePath { start_time: start, positions, tainted })
}

/// Path from `z` taking the left arrow whenever there is one.
pub fn leftmost_path(field: &ArrowField, z: (i64, i64)) -> Result<LatticePath> {
    extremal(field, z.0, z.1, false)
}

/// Path from `z` taking the right arrow whenever there is one.
pub fn rightmost_path(field: &ArrowField, z: (i64, i64)) -> Result<LatticePath> {
    extremal(field, z.0, z.1, true)
}

fn dual_extremal(field: &ArrowField, x: i64, t: i64, prefer_right: bool) -> Result<DualLatticePath> {
    if (x + t).rem_euclid(2) != 1 {
        return Err(Error::Parity { x, t });
    }
    if !field.contains_dual(x, t) && !(t == field.t_lo() && x >= field.x_lo() && x <= field.x_hi()) {
        return Err(Error::OutOfWindow { x, t });
    }
    let start = t;
    let mut positions = vec![x];
    let mut tainted = false;
    let (mut x, mut t) = (x, t);
    while t > field.t_lo() {
        let a = field.get_dual(x, t).unwrap();
        let go_right = if prefer_right { a.has_right() } else { !a.has_left() };
        let nx = if go_right { x + 1 } else { x - 1 };
        if nx < field.x_lo() || nx > field.x_hi() {
            tainted = true;
            break;
        }
        positions.push(nx);
        x = nx;
        t -= 1;
    }
    Ok(DualLatticePath { start_time: start, positions, tainted })
}

/// Dual left-most path from dual site `z`, running down to `t_lo`.
///
/// It takes the spatially right dual arrow whenever there is one: seen
/// forward in time it is the path bounding the net from the left-most
/// side, and it is the one no forward left-most path can cross.
pub fn dual_leftmost(field: &ArrowField, z: (i64, i64)) -> Result<DualLatticePath> {
    dual_extremal(field, z.0, z.1, true)
}

/// Dual right-most path from `z`; takes the spatially left dual arrow
/// whenever there is one.
pub fn dual_rightmost(field: &ArrowField, z: (i64, i64)) -> Result<DualLatticePath> {
    dual_extremal(field, z.0, z.1, false)
}

/// Does every step of `path` follow an arrow of `field`?
pub fn is_net_path(field: &ArrowField, path: &LatticePath) -> bool {
    let mut prev: Option<(i64, i64)> = None;
    for (t, x) in path.points() {
        if !field.contains(x, t) {
            return false;
        }
        if let Some((px, pt)) = prev {
            let a = field.get(px, pt).unwrap();
            let ok = match x - px {
                1 => a.has_right(),
                -1 => a.has_left(),
                _ => false,
            };
            if !ok {
                return false;
            }
        }
        prev = Some((x, t));
    }
    true
}

/// Does every step of `path` follow a dual arrow?
pub fn is_dual_net_path(field: &ArrowField, path: &DualLatticePath) -> bool {
    let mut prev: Option<(i64, i64)> = None;
    for (t, x) in path.points() {
        if (x + t).rem_euclid(2) != 1 || x < field.x_lo() || x > field.x_hi() || t < field.t_lo() {
            return false;
        }
        if let Some((px, pt)) = prev {
            let Some(a) = field.get_dual(px, pt) else { return false };
            let ok = match x - px {
                1 => a.has_right(),
                -1 => a.has_left(),
                _ => false,
            };
            if !ok {
                return false;
            }
        }
        prev = Some((x, t));
    }
    true
}

/// Follow `p1` up to `t_hop`, then `p2`.
///
/// Requires `t_hop > σ₁ ∨ σ₂` (strict) and `p1(t_hop) = p2(t_hop)`.
pub fn hop_concatenate(p1: &LatticePath, p2: &LatticePath, t_hop: i64) -> Result<LatticePath> {
    if t_hop <= p1.start_time.max(p2.start_time) {
        return Err(Error::Precondition(format!(
            "hop time {t_hop} must exceed both start times {} and {}",
            p1.start_time, p2.start_time
        )));
    }
    match (p1.at(t_hop), p2.at(t_hop)) {
        (Some(a), Some(b)) if a == b => {}
        (a, b) => return Err(Error::Precondition(format!("paths disagree at hop time {t_hop}: {a:?} vs {b:?}"))),
    }
    let mut positions = p1.truncated(t_hop).positions;
    positions.extend_from_slice(&p2.positions[(t_hop - p2.start_time) as usize + 1..]);
    Ok(LatticePath { start_time: p1.start_time, positions, tainted: p2.tainted })
}

/// First `t > σ₁ ∨ σ₂` with `p1(t) = p2(t)`.
pub fn first_meeting_time(p1: &LatticePath, p2: &LatticePath) -> Result<Option<i64>> {
    let from = p1.start_time.max(p2.start_time);
    let to = p1.end_time().min(p2.end_time());
    for t in from..=to {
        let (a, b) = (p1.at(t).unwrap(), p2.at(t).unwrap());
        if (a - b).rem_euclid(2) != 0 {
            return Err(Error::Parity { x: b, t });
        }
        if t > from && a == b {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// A path reflected off a dual path, with its reflection times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectedPath {
    pub path: LatticePath,
    /// Times `s` at which the path sat at a `Both` site in contact with the
    /// dual path and was turned left by it.
    pub reflection_times: Vec<i64>,
}

/// The maximal net path from `z` that stays left of `dual` while the dual
/// path is alive (up to its start time σ̂), continuing as a right-most path
/// afterwards.
///
/// Greedy rule: step right when the right arrow exists and the new position
/// is still left of the dual path, else step left. When the dual path
/// follows dual arrows the left arrow always exists at contact, and the
/// greedy path dominates every admissible net path by induction.
pub fn reflected_rightmost(field: &ArrowField, z: (i64, i64), dual: &DualLatticePath) -> Result<ReflectedPath> {
    let (x0, t0) = z;
    if (x0 + t0).rem_euclid(2) != 0 {
        return Err(Error::Parity { x: x0, t: t0 });
    }
    if !field.contains(x0, t0) {
        return Err(Error::OutOfWindow { x: x0, t: t0 });
    }
    let sigma_hat = dual.start_time;
    if t0 <= sigma_hat {
        match dual.at(t0) {
            None => return Err(Error::NoAdmissiblePath(format!("dual path is not defined at time {t0}"))),
            Some(d) if x0 > d - 1 => {
                return Err(Error::NoAdmissiblePath(format!("start ({x0},{t0}) is right of the dual path at {d}")))
            }
            _ => {}
        }
    }
    let mut positions = vec![x0];
    let mut reflection_times = Vec::new();
    let mut tainted = false;
    let (mut x, mut t) = (x0, t0);
    while t < field.t_hi() {
        let a = field.get(x, t).unwrap();
        let bound = if t < sigma_hat { dual.at(t + 1).map(|d| d - 1) } else { None };
        let nx = match bound {
            Some(b) if a.has_right() && x + 1 > b => {
                if !a.has_left() {
                    return Err(Error::NoAdmissiblePath(format!(
                        "dead end at ({x},{t}): only a right arrow and it crosses the dual path"
                    )));
                }
                reflection_times.push(t);
                x - 1
            }
            _ => {
                if a.has_right() {
                    x + 1
                } else {
                    x - 1
                }
            }
        };
        if !field.contains(nx, t + 1) {
            tainted = true;
            break;
        }
        positions.push(nx);
        x = nx;
        t += 1;
    }
    Ok(ReflectedPath { path: LatticePath { start_time: t0, positions, tainted }, reflection_times })
}

/// A point of the compactified plane; infinities are allowed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactPoint {
    pub x: f64,
    pub t: f64,
}

/// The diffusive scaling map `S_ε(x, t) = (εx, ε²t)`.
pub fn rescale_point(x: f64, t: f64, epsilon: f64) -> CompactPoint {
    CompactPoint { x: epsilon * x, t: epsilon * epsilon * t }
}

pub fn rescale(path: &LatticePath, epsilon: f64) -> Vec<CompactPoint> {
    path.points().map(|(t, x)| rescale_point(x as f64, t as f64, epsilon)).collect()
}

fn squash_space(x: f64, t: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    x.tanh() / (1.0 + t.abs())
}

/// Metric on the compactified plane:
/// `|tanh t₁ − tanh t₂| ∨ |tanh x₁/(1+|t₁|) − tanh x₂/(1+|t₂|)|`.
pub fn rho(a: CompactPoint, b: CompactPoint) -> f64 {
    let dt = (a.t.tanh() - b.t.tanh()).abs();
    let dx = (squash_space(a.x, a.t) - squash_space(b.x, b.t)).abs();
    dt.max(dx)
}

/// A continuous path given by `(t, x)` knots, linear in between and constant
/// after the last knot.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuumPath {
    pub knots: Vec<(f64, f64)>,
}

impl ContinuumPath {
    pub fn start_time(&self) -> f64 {
        self.knots[0].0
    }

    /// Position at `t ∨ σ`, extended as a constant after the last knot.
    pub fn value(&self, t: f64) -> f64 {
        let k = &self.knots;
        if t <= k[0].0 {
            return k[0].1;
        }
        let last = k[k.len() - 1];
        if t >= last.0 {
            return last.1;
        }
        let i = k.partition_point(|&(s, _)| s <= t);
        let (t0, x0) = k[i - 1];
        let (t1, x1) = k[i];
        x0 + (x1 - x0) * (t - t0) / (t1 - t0)
    }
}

/// Subdivisions per linear piece when searching for the supremum.
const SUP_SUBDIVISIONS: usize = 16;

/// Path metric `d(π₁, π₂) = |tanh σ₁ − tanh σ₂| ∨ sup_{t ≥ σ₁∧σ₂} |tanh π₁(t∨σ₁) − tanh π₂(t∨σ₂)| / (1+|t|)`.
///
/// The supremum is taken over all knots of both paths, `t = 0` when it is
/// in range, and a uniform subdivision of each linear piece. Beyond the last
/// knot both paths are constant and the ratio is largest at the first such
/// point of smallest `|t|`, which is included.
pub fn path_distance(p1: &ContinuumPath, p2: &ContinuumPath) -> f64 {
    let (s1, s2) = (p1.start_time(), p2.start_time());
    let start = s1.min(s2);
    let mut breaks: Vec<f64> = p1.knots.iter().chain(p2.knots.iter()).map(|k| k.0).collect();
    breaks.push(start);
    if start < 0.0 {
        breaks.push(0.0);
    }
    breaks.retain(|&t| t >= start);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    let f = |t: f64| (p1.value(t).tanh() - p2.value(t).tanh()).abs() / (1.0 + t.abs());
    let mut sup: f64 = 0.0;
    for w in breaks.windows(2) {
        for j in 0..SUP_SUBDIVISIONS {
            let t = w[0] + (w[1] - w[0]) * j as f64 / SUP_SUBDIVISIONS as f64;
            sup = sup.max(f(t));
        }
    }
    if let Some(&last) = breaks.last() {
        sup = sup.max(f(last));
    }
    (s1.tanh() - s2.tanh()).abs().max(sup)
}

/// Two-sided Hausdorff distance built on `path_distance`. Two empty sets are
/// at distance 0; an empty and a non-empty set are at infinite distance.
pub fn hausdorff_distance(k1: &[ContinuumPath], k2: &[ContinuumPath]) -> f64 {
    if k1.is_empty() && k2.is_empty() {
        return 0.0;
    }
    if k1.is_empty() || k2.is_empty() {
        return f64::INFINITY;
    }
    let one_sided = |a: &[ContinuumPath], b: &[ContinuumPath]| {
        a.iter().map(|p| b.iter().map(|q| path_distance(p, q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    one_sided(k1, k2).max(one_sided(k2, k1))
}

/// Write each path as `<prefix><i>.csv` plus an `index.csv` listing them.
pub fn write_path_set(dir: &Path, prefix: &str, paths: &[LatticePath]) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut index = String::from("file,start_x,start_time,end_time,tainted\n");
    for (i, p) in paths.iter().enumerate() {
        let name = format!("{prefix}{i}.csv");
        std::fs::write(dir.join(&name), p.to_csv())?;
        let _ = writeln!(index, "{name},{},{},{},{}", p.positions[0], p.start_time, p.end_time(), p.tainted);
    }
    std::fs::write(dir.join("index.csv"), index)
}

/// All positions in the closure of `paths` at time `t`.
pub fn positions_at(paths: &[LatticePath], t: i64) -> BTreeSet<i64> {
    paths.iter().filter_map(|p| p.at(t)).collect()
}
