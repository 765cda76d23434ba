//! Special sites of an arrow field: reachable sets, the per-site census,
//! relevant separation points, wedges, meshes and T-mesh components.

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{sample_arrow_field, Arrow, ArrowField, LatticeConfig};
use crate::paths::{dual_leftmost, dual_rightmost, leftmost_path, rightmost_path, DualLatticePath, LatticePath};
use crate::rng;
use crate::stats::{mc_mean, psi, relevant_density_integral, EstimateReport};

/// Positions occupied at each time by net paths started from every stored
/// site at `start_time` (forward), or from every stored dual site at
/// `start_time` (dual, running downward).
#[derive(Clone, Debug)]
pub struct ReachableSet {
    pub start_time: i64,
    x_lo: i64,
    x_hi: i64,
    dual: bool,
    rows: Vec<Vec<bool>>,
}

impl ReachableSet {
    fn row(&self, t: i64) -> Option<&Vec<bool>> {
        let k = if self.dual { self.start_time - t } else { t - self.start_time };
        if k < 0 {
            return None;
        }
        self.rows.get(k as usize)
    }

    pub fn contains(&self, x: i64, t: i64) -> bool {
        if x < self.x_lo || x > self.x_hi {
            return false;
        }
        self.row(t).is_some_and(|r| r[(x - self.x_lo) as usize])
    }

    pub fn positions(&self, t: i64) -> Vec<i64> {
        match self.row(t) {
            Some(r) => r.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| self.x_lo + i as i64).collect(),
            None => Vec::new(),
        }
    }

    /// Occupied positions in `[lo, hi)` at time `t`.
    pub fn count_in(&self, t: i64, lo: i64, hi: i64) -> usize {
        self.positions(t).into_iter().filter(|&x| x >= lo && x < hi).count()
    }

    /// Times covered, in increasing order.
    pub fn times(&self) -> Vec<i64> {
        let n = self.rows.len() as i64;
        if self.dual {
            (self.start_time - n + 1..=self.start_time).collect()
        } else {
            (self.start_time..self.start_time + n).collect()
        }
    }
}

/// Forward closure under arrows of the whole stored row `s`.
pub fn reachable_set(field: &ArrowField, s: i64) -> Result<ReachableSet> {
    if s < field.t_lo() || s > field.t_hi() {
        return Err(Error::OutOfWindow { x: field.x_lo(), t: s });
    }
    let (x_lo, x_hi) = (field.x_lo(), field.x_hi());
    let width = (x_hi - x_lo + 1) as usize;
    let mut rows = Vec::with_capacity((field.t_hi() - s + 1) as usize);
    let mut cur = vec![false; width];
    for x in field.row_sites(s) {
        cur[(x - x_lo) as usize] = true;
    }
    for t in s..field.t_hi() {
        let mut next = vec![false; width];
        for x in field.row_sites(t) {
            if !cur[(x - x_lo) as usize] {
                continue;
            }
            let a = field.get(x, t).unwrap();
            if a.has_left() && x > x_lo {
                next[(x - 1 - x_lo) as usize] = true;
            }
            if a.has_right() && x < x_hi {
                next[(x + 1 - x_lo) as usize] = true;
            }
        }
        rows.push(cur);
        cur = next;
    }
    rows.push(cur);
    Ok(ReachableSet { start_time: s, x_lo, x_hi, dual: false, rows })
}

/// Dual closure of the whole stored dual row `s`, running down to `t_lo`.
pub fn dual_reachable_set(field: &ArrowField, s: i64) -> Result<ReachableSet> {
    if s <= field.t_lo() || s > field.t_hi() + 1 {
        return Err(Error::OutOfWindow { x: field.x_lo(), t: s });
    }
    let (x_lo, x_hi) = (field.x_lo(), field.x_hi());
    let width = (x_hi - x_lo + 1) as usize;
    let mut rows = Vec::new();
    let mut cur = vec![false; width];
    for x in field.dual_row_sites(s) {
        cur[(x - x_lo) as usize] = true;
    }
    for t in (field.t_lo() + 1..=s).rev() {
        let mut next = vec![false; width];
        for x in field.dual_row_sites(t) {
            if !cur[(x - x_lo) as usize] {
                continue;
            }
            let a = field.get_dual(x, t).unwrap();
            if a.has_left() && x > x_lo {
                next[(x - 1 - x_lo) as usize] = true;
            }
            if a.has_right() && x < x_hi {
                next[(x + 1 - x_lo) as usize] = true;
            }
        }
        rows.push(cur);
        cur = next;
    }
    rows.push(cur);
    Ok(ReachableSet { start_time: s, x_lo, x_hi, dual: true, rows })
}

/// Lattice-resolvable site types. A `Both` site is a separation point and,
/// equivalently, a crossing point (see `SiteCensus::crossing`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SiteKind {
    Plain,
    Meeting,
    Separation,
}

impl SiteKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SiteKind::Plain => "plain",
            SiteKind::Meeting => "meeting",
            SiteKind::Separation => "separation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteCensus {
    pub x: i64,
    pub t: i64,
    pub kind: SiteKind,
    /// The right-most path from the site and the dual left-most path from
    /// the dual site above swap order across this site.
    pub crossing: bool,
    pub m_in: u8,
    pub m_out: u8,
    pub dual_m_in: u8,
    pub dual_m_out: u8,
}

/// Does the right-most step from `(x,t)` swap order with the dual
/// left-most step from `(x,t+1)`?
pub fn crossing_at(field: &ArrowField, x: i64, t: i64) -> Option<bool> {
    let a = field.get(x, t)?;
    let d = field.get_dual(x, t + 1)?;
    let fwd_next = if a.has_right() { x + 1 } else { x - 1 };
    let dual_prev = if d.has_right() { x + 1 } else { x - 1 };
    // Order at time t: forward x against dual_prev; at t+1: fwd_next against x.
    Some((x < dual_prev) != (fwd_next < x))
}

/// Classify every site of the configured window whose forward and dual
/// light cones stay inside the stored window. Forward occupation is
/// `ξ^{(t_lo)}`; dual occupation starts from the top dual row.
pub fn census(field: &ArrowField) -> Result<Vec<SiteCensus>> {
    let c = field.config();
    let xi = reachable_set(field, c.t_lo)?;
    let dual = dual_reachable_set(field, c.t_hi + 1)?;
    let mut out = Vec::new();
    for t in c.t_lo..=c.t_hi {
        for x in field.row_sites(t) {
            if x < c.x_lo || x > c.x_hi {
                continue;
            }
            let back = t - c.t_lo;
            let fwd = c.t_hi - t;
            if x - back.max(fwd) < field.x_lo() || x + back.max(fwd) > field.x_hi() {
                continue;
            }
            let a = field.get(x, t).unwrap();
            let occupied = xi.contains(x, t);
            let mut m_in = 0;
            if t > c.t_lo {
                if xi.contains(x - 1, t - 1) && field.get(x - 1, t - 1).unwrap().has_right() {
                    m_in += 1;
                }
                if xi.contains(x + 1, t - 1) && field.get(x + 1, t - 1).unwrap().has_left() {
                    m_in += 1;
                }
            }
            let m_out = if occupied { a.out_degree() } else { 0 };
            let d = a.mirror();
            let dual_occ = dual.contains(x, t + 1);
            let mut dual_m_in = 0;
            if t + 1 < c.t_hi + 1 {
                if dual.contains(x - 1, t + 2) && field.get_dual(x - 1, t + 2).unwrap().has_right() {
                    dual_m_in += 1;
                }
                if dual.contains(x + 1, t + 2) && field.get_dual(x + 1, t + 2).unwrap().has_left() {
                    dual_m_in += 1;
                }
            }
            let dual_m_out = if dual_occ { d.out_degree() } else { 0 };
            let kind = if a.is_both() {
                SiteKind::Separation
            } else if m_in == 2 {
                SiteKind::Meeting
            } else {
                SiteKind::Plain
            };
            out.push(SiteCensus {
                x,
                t,
                kind,
                crossing: crossing_at(field, x, t).unwrap(),
                m_in,
                m_out,
                dual_m_in,
                dual_m_out,
            });
        }
    }
    Ok(out)
}

pub fn census_csv(rows: &[SiteCensus]) -> String {
    let mut s = String::from("x,t,kind,m_in,m_out,dual_m_in,dual_m_out\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.x,
            r.t,
            r.kind.as_str(),
            r.m_in,
            r.m_out,
            r.dual_m_in,
            r.dual_m_out
        ));
    }
    s
}

/// `(s,u)`-relevant separation points of a field.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelevantSet {
    pub sites: Vec<(i64, i64)>,
    /// Candidates left undecided because an extremal path left the window
    /// before `u`.
    pub ambiguous: Vec<(i64, i64)>,
}

/// All `Both` sites `(x,t)` with `s < t < u`, reachable from time `s`, whose
/// left-most and right-most paths do not meet at any time in `(t, u)`.
pub fn relevant_separation_points(field: &ArrowField, s: i64, u: i64) -> Result<RelevantSet> {
    if s >= u {
        return Err(Error::InvalidConfig(format!("need s < u, got s={s} u={u}")));
    }
    if s < field.t_lo() || u > field.t_hi() {
        return Err(Error::InvalidConfig(format!(
            "[{s}, {u}] must lie in the time window [{}, {}]",
            field.t_lo(),
            field.t_hi()
        )));
    }
    let xi = reachable_set(field, s)?;
    let mut out = RelevantSet::default();
    for t in s + 1..u {
        for x in xi.positions(t) {
            if !field.get(x, t).unwrap().is_both() {
                continue;
            }
            match separated_until(field, x, t, u) {
                Some(true) => out.sites.push((x, t)),
                Some(false) => {}
                None => out.ambiguous.push((x, t)),
            }
        }
    }
    Ok(out)
}

/// Do the left-most and right-most paths from `(x,t)` stay apart on
/// `(t, u)`? `None` when a path leaves the window first.
fn separated_until(field: &ArrowField, x: i64, t: i64, u: i64) -> Option<bool> {
    let (mut l, mut r) = (x, x);
    for s in t..u - 1 {
        let (la, ra) = (field.get(l, s)?, field.get(r, s)?);
        l = if la.has_left() { l - 1 } else { l + 1 };
        r = if ra.has_right() { r + 1 } else { r - 1 };
        if l == r {
            return Some(false);
        }
        if !field.contains(l, s + 1) || !field.contains(r, s + 1) {
            return None;
        }
    }
    Some(true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelevantDensityConfig {
    pub epsilon: f64,
    pub s: f64,
    pub u: f64,
    pub a: f64,
    pub b: f64,
    pub reps: usize,
    pub seed: u64,
}

/// Lattice layout of a rescaled box: rows `[t0, t1]`, counted columns
/// `[c0, c1)` and the field window with light-cone margins.
fn rescaled_box(epsilon: f64, s: f64, u: f64, a: f64, b: f64) -> (i64, i64, i64, i64, LatticeConfig) {
    let e2 = epsilon * epsilon;
    let t0 = (s / e2).round() as i64;
    let t1 = (u / e2).round() as i64;
    let c0 = (a / epsilon).ceil() as i64;
    let c1 = (b / epsilon).ceil() as i64;
    let m = (t1 - t0) + 2;
    let x_lo = c0 - m;
    let mut x_hi = c1 + m;
    if (x_hi - x_lo) % 2 != 0 {
        x_hi += 1;
    }
    (t0, t1, c0, c1, LatticeConfig::new(epsilon, x_lo, x_hi, t0, t1, 0))
}

/// Monte Carlo mean of the number of `(s,u)`-relevant separation points in
/// the rescaled box `[a,b) × (s,u)`.
pub fn relevant_density_estimate(cfg: &RelevantDensityConfig) -> Result<EstimateReport> {
    if cfg.reps == 0 {
        return Err(Error::InvalidConfig("reps must be positive".into()));
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0) {
        return Err(Error::InvalidConfig("epsilon must lie in (0, 1]".into()));
    }
    let reference = relevant_density_integral(cfg.s, cfg.s, cfg.u, cfg.u, cfg.a, cfg.b)?;
    let (t0, t1, c0, c1, base) = rescaled_box(cfg.epsilon, cfg.s, cfg.u, cfg.a, cfg.b);
    if t0 == t1 {
        return Ok(EstimateReport::new(0.0, 0.0, cfg.reps as u64).with_reference(reference));
    }
    let counts: Vec<Result<(f64, bool)>> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut lc = base.clone();
            lc.seed = rng::replicate_seed(cfg.seed, i);
            let field = sample_arrow_field(&lc)?;
            let rel = relevant_separation_points(&field, t0, t1)?;
            let n = rel.sites.iter().filter(|&&(x, _)| x >= c0 && x < c1).count();
            let undecided = rel.ambiguous.iter().any(|&(x, _)| x >= c0 && x < c1);
            Ok((n as f64, undecided))
        })
        .collect();
    let mut values = Vec::with_capacity(cfg.reps);
    let mut tainted = false;
    for c in counts {
        let (v, t) = c?;
        values.push(v);
        tainted |= t;
    }
    Ok(mc_mean(&values).with_reference(reference).with_taint(tainted))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiDensityConfig {
    pub epsilon: f64,
    /// Rescaled time at which the density is read.
    pub time: f64,
    /// Rescaled width of the counting interval.
    pub width: f64,
    pub reps: usize,
    pub seed: u64,
}

/// Density of `ξ^{(0)}_t` per unit rescaled length, walkers started from
/// every site at time 0; the reference is `Ψ(t)`.
pub fn xi_density_estimate(cfg: &XiDensityConfig) -> Result<EstimateReport> {
    if cfg.reps == 0 {
        return Err(Error::InvalidConfig("reps must be positive".into()));
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0) {
        return Err(Error::InvalidConfig("epsilon must lie in (0, 1]".into()));
    }
    let (_, t1, c0, c1, base) = rescaled_box(cfg.epsilon, 0.0, cfg.time, 0.0, cfg.width);
    let rescaled_width = (c1 - c0) as f64 * cfg.epsilon;
    let values: Vec<Result<f64>> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut lc = base.clone();
            lc.seed = rng::replicate_seed(cfg.seed, i);
            let field = sample_arrow_field(&lc)?;
            let xi = reachable_set(&field, 0)?;
            Ok(xi.count_in(t1, c0, c1) as f64 / rescaled_width)
        })
        .collect();
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    Ok(mc_mean(&values).with_reference(psi(cfg.time)))
}

/// Mean number of occupied sites on the top row of `config`'s window when
/// walkers start from every site of its bottom row (no margin: walkers that
/// leave the window are lost).
pub fn occupancy_estimate(config: &LatticeConfig, reps: usize) -> Result<EstimateReport> {
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be positive".into()));
    }
    let values: Vec<Result<f64>> = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut lc = config.clone();
            lc.margin = 0;
            lc.seed = rng::replicate_seed(config.seed, i);
            let field = sample_arrow_field(&lc)?;
            Ok(reachable_set(&field, lc.t_lo)?.positions(lc.t_hi).len() as f64)
        })
        .collect();
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    Ok(mc_mean(&values))
}

/// An open space-time region bounded by two walls, with positions and times
/// measured in quarter units so every wall and path sample is an integer.
pub trait Region {
    /// Wall positions `(left, right)` at quarter time `q`, or `None` outside
    /// the closed time span of the region.
    fn walls(&self, q: i64) -> Option<(i64, i64)>;
    /// Is quarter time `q` inside the open time span?
    fn open_time(&self, q: i64) -> bool;

    /// First integer time at which the region is known. Below it the region
    /// was cut by the window rather than closed, so "outside" is undecided.
    fn known_from(&self) -> Option<i64> {
        None
    }

    fn in_closure(&self, q: i64, y: i64) -> bool {
        self.walls(q).is_some_and(|(l, r)| l <= y && y <= r)
    }

    fn in_open(&self, q: i64, y: i64) -> bool {
        self.open_time(q) && self.walls(q).is_some_and(|(l, r)| l < y && y < r)
    }
}

/// Quarter-unit position of a piecewise-linear path at quarter time `q`.
fn quarter(at: impl Fn(i64) -> Option<i64>, q: i64) -> Option<i64> {
    let k = q.div_euclid(4);
    let frac = q.rem_euclid(4);
    let p0 = at(k)?;
    if frac == 0 {
        return Some(4 * p0);
    }
    let p1 = at(k + 1)?;
    Some(4 * p0 + frac * (p1 - p0))
}

/// `r̂` on the left, `l̂` on the right, from their common start time down to
/// their first meeting time (or the bottom of the window).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wedge {
    pub r: DualLatticePath,
    pub l: DualLatticePath,
    pub top_time: i64,
    /// First time below the top at which the walls meet; `None` if they are
    /// still apart at the bottom of the window.
    pub bottom_time: Option<i64>,
    low: i64,
}

impl Wedge {
    /// Wedge of the dual right-most path from `(x_r, t)` and the dual
    /// left-most path from `(x_l, t)`, `x_r < x_l`.
    pub fn new(field: &ArrowField, t: i64, x_r: i64, x_l: i64) -> Result<Wedge> {
        if x_r >= x_l {
            return Err(Error::Precondition(format!("need x_r < x_l, got {x_r} and {x_l}")));
        }
        let r = dual_rightmost(field, (x_r, t))?;
        let l = dual_leftmost(field, (x_l, t))?;
        Ok(Wedge::from_walls(r, l))
    }

    pub fn from_walls(r: DualLatticePath, l: DualLatticePath) -> Wedge {
        let top = r.start_time.min(l.start_time);
        let low = r.end_time().max(l.end_time());
        let bottom_time = (low..top).rev().find(|&s| r.at(s) == l.at(s));
        Wedge { top_time: top, bottom_time, low: bottom_time.unwrap_or(low), r, l }
    }
}

impl Region for Wedge {
    fn walls(&self, q: i64) -> Option<(i64, i64)> {
        if q < 4 * self.low || q > 4 * self.top_time {
            return None;
        }
        Some((quarter(|s| self.r.at(s), q)?, quarter(|s| self.l.at(s), q)?))
    }

    fn known_from(&self) -> Option<i64> {
        self.bottom_time.is_none().then_some(self.low)
    }

    fn open_time(&self, q: i64) -> bool {
        let above_bottom = match self.bottom_time {
            Some(b) => q > 4 * b,
            None => q >= 4 * self.low,
        };
        above_bottom && q < 4 * self.top_time
    }
}

/// Region between the right-most-type path `r` on the left and the
/// left-most-type path `l` on the right, both leaving the `Both` site
/// `bottom`, up to their first meeting time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mesh {
    pub r: LatticePath,
    pub l: LatticePath,
    pub bottom: (i64, i64),
    /// First meeting time of `r` and `l`; `None` if apart at the window top.
    pub top_time: Option<i64>,
    high: i64,
}

impl Mesh {
    /// Mesh with bottom at the `Both` site `z`: `r` steps left then follows
    /// right-most arrows, `l` steps right then follows left-most arrows.
    pub fn at_separation(field: &ArrowField, z: (i64, i64)) -> Result<Mesh> {
        let (x, t) = z;
        if !field.mask(x, t)?.is_both() {
            return Err(Error::Precondition(format!("({x},{t}) is not a branching site")));
        }
        if t >= field.t_hi() {
            return Err(Error::Precondition("a mesh needs at least one row above its bottom".into()));
        }
        let tail = |p: Result<LatticePath>| -> Result<LatticePath> {
            let p = p?;
            let mut positions = vec![x];
            positions.extend_from_slice(&p.positions);
            Ok(LatticePath { start_time: t, positions, tainted: p.tainted })
        };
        let r = if field.contains(x - 1, t + 1) {
            tail(rightmost_path(field, (x - 1, t + 1)))?
        } else {
            return Err(Error::OutOfWindow { x: x - 1, t: t + 1 });
        };
        let l = if field.contains(x + 1, t + 1) {
            tail(leftmost_path(field, (x + 1, t + 1)))?
        } else {
            return Err(Error::OutOfWindow { x: x + 1, t: t + 1 });
        };
        Ok(Mesh::from_walls(r, l))
    }

    pub fn from_walls(r: LatticePath, l: LatticePath) -> Mesh {
        let bottom = (r.positions[0], r.start_time);
        let end = r.end_time().min(l.end_time());
        let top_time = (r.start_time + 1..=end).find(|&s| r.at(s) == l.at(s));
        Mesh { high: top_time.unwrap_or(end), top_time, bottom, r, l }
    }
}

impl Region for Mesh {
    fn walls(&self, q: i64) -> Option<(i64, i64)> {
        if q < 4 * self.bottom.1 || q > 4 * self.high {
            return None;
        }
        Some((quarter(|s| self.r.at(s), q)?, quarter(|s| self.l.at(s), q)?))
    }

    fn open_time(&self, q: i64) -> bool {
        let below_top = match self.top_time {
            Some(t) => q < 4 * t,
            None => q <= 4 * self.high,
        };
        q > 4 * self.bottom.1 && below_top
    }
}

/// Does `path` enter `region` from outside: is there `s < t` with
/// `π(s)` outside the closure and `π(t)` in the open region? Checked on the
/// quarter-time grid.
pub fn enters_from_outside(path: &LatticePath, region: &impl Region) -> bool {
    let mut seen_outside = false;
    let from = path.start_time.max(region.known_from().unwrap_or(i64::MIN));
    for q in 4 * from..=4 * path.end_time() {
        let y = quarter(|s| path.at(s), q).unwrap();
        if !region.in_closure(q, y) {
            seen_outside = true;
        } else if seen_outside && region.in_open(q, y) {
            return true;
        }
    }
    false
}

/// Does `path` enter `region`: is there `σ_π < s < t` with `π(s)` outside
/// the open region and `π(t)` in it? The start point itself does not count
/// as a point outside.
pub fn enters(path: &LatticePath, region: &impl Region) -> bool {
    let mut seen_outside = false;
    let from = path.start_time.max(region.known_from().unwrap_or(i64::MIN));
    let q0 = if from == path.start_time { 4 * from + 1 } else { 4 * from };
    for q in q0..=4 * path.end_time() {
        let y = quarter(|s| path.at(s), q).unwrap();
        if !region.in_open(q, y) {
            seen_outside = true;
        } else if seen_outside {
            return true;
        }
    }
    false
}

pub fn wedge_entered_from_outside(path: &LatticePath, wedge: &Wedge) -> bool {
    enters_from_outside(path, wedge)
}

pub fn mesh_entered(path: &LatticePath, mesh: &Mesh) -> bool {
    enters(path, mesh)
}

/// Does any net path of `field` enter `region` from outside?
///
/// Sweeps upward keeping the set of sites reachable by some net path that
/// has already been outside the closure; the answer is yes iff one of their
/// arrows passes through the open region. Returns the offending arrow.
pub fn any_net_path_enters_from_outside(field: &ArrowField, region: &impl Region) -> Option<((i64, i64), i64)> {
    let (x_lo, x_hi) = (field.x_lo(), field.x_hi());
    let width = (x_hi - x_lo + 1) as usize;
    let mut been_out = vec![false; width];
    let from = field.t_lo().max(region.known_from().unwrap_or(i64::MIN));
    for t in from..field.t_hi() {
        let mut next = vec![false; width];
        for x in field.row_sites(t) {
            let i = (x - x_lo) as usize;
            let here = been_out[i] || !region.in_closure(4 * t, 4 * x);
            if !here {
                continue;
            }
            let a = field.get(x, t).unwrap();
            for (ok, dx) in [(a.has_left(), -1), (a.has_right(), 1)] {
                if !ok {
                    continue;
                }
                for f in 1..=4 {
                    if region.in_open(4 * t + f, 4 * x + f * dx) {
                        return Some(((x, t), dx));
                    }
                }
                let nx = x + dx;
                if nx >= x_lo && nx <= x_hi {
                    next[(nx - x_lo) as usize] = true;
                }
            }
        }
        been_out = next;
    }
    None
}

/// Does any net path of `field` enter `region` in the sense of [`enters`]?
///
/// Same sweep as [`any_net_path_enters_from_outside`], with "outside" meaning
/// outside the open region, and a site only counting as outside for paths
/// that arrived there from an earlier time.
pub fn any_net_path_enters(field: &ArrowField, region: &impl Region) -> Option<((i64, i64), i64)> {
    let (x_lo, x_hi) = (field.x_lo(), field.x_hi());
    let width = (x_hi - x_lo + 1) as usize;
    let from = field.t_lo().max(region.known_from().unwrap_or(i64::MIN));
    let mut been_out = vec![false; width];
    let mut arrived = vec![false; width];
    for t in from..field.t_hi() {
        let mut next_out = vec![false; width];
        let mut next_arrived = vec![false; width];
        for x in field.row_sites(t) {
            let i = (x - x_lo) as usize;
            let a = field.get(x, t).unwrap();
            for (ok, dx) in [(a.has_left(), -1), (a.has_right(), 1)] {
                if !ok {
                    continue;
                }
                let mut out = been_out[i] || (arrived[i] && !region.in_open(4 * t, 4 * x));
                for f in 1..=4 {
                    if region.in_open(4 * t + f, 4 * x + f * dx) {
                        if out {
                            return Some(((x, t), dx));
                        }
                    } else {
                        out = true;
                    }
                }
                let nx = x + dx;
                if nx >= x_lo && nx <= x_hi {
                    let j = (nx - x_lo) as usize;
                    next_out[j] |= out;
                    next_arrived[j] = true;
                }
            }
        }
        been_out = next_out;
        arrived = next_arrived;
    }
    None
}

/// A connected component of the dual cells above time `T` not separated by
/// arrows of `ξ^{(T)}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeshComponent {
    /// Cell centres `(x, t)`, dual parity, sorted by time then space.
    pub cells: Vec<(i64, i64)>,
    pub bottom_time: i64,
    /// Forward site closing the component from above.
    pub top_site: Option<(i64, i64)>,
    /// Continues above the window.
    pub open: bool,
    /// Touches the spatial edge of the window.
    pub tainted: bool,
}

impl MeshComponent {
    pub fn is_closed(&self) -> bool {
        !self.open && !self.tainted
    }
}

type Edge = ((i64, i64), (i64, i64), bool);

/// Decompose the cells above `T` into components.
///
/// The cell centred at dual site `(x,t)` has corners `(x,t±1)`, `(x±1,t)`.
/// Its four edges are arrows of forward sites: bottom-left is the left
/// arrow of `(x,t-1)`, bottom-right the right arrow of `(x,t-1)`, top-left
/// the right arrow of `(x-1,t)`, top-right the left arrow of `(x+1,t)`.
/// Two cells sharing an edge are joined unless that arrow is used by an
/// occupied site. Cells below `T` are not part of the picture.
pub fn t_mesh_components(field: &ArrowField, big_t: i64) -> Result<Vec<MeshComponent>> {
    let xi = reachable_set(field, big_t)?;
    let (x_lo, x_hi, t_hi) = (field.x_lo(), field.x_hi(), field.t_hi());
    let used = |x: i64, t: i64, right: bool| -> bool {
        xi.contains(x, t) && field.get(x, t).is_some_and(|a| if right { a.has_right() } else { a.has_left() })
    };
    let cell_ok = |x: i64, t: i64| t >= big_t && t < t_hi && x > x_lo && x < x_hi && (x + t).rem_euclid(2) == 1;
    // (neighbour offset, edge site offset, uses right arrow)
    let edges: [Edge; 4] =
        [((1, 1), (1, 0), false), ((-1, 1), (-1, 0), true), ((1, -1), (0, -1), true), ((-1, -1), (0, -1), false)];
    let width = (x_hi - x_lo + 1) as usize;
    let rows = (t_hi - big_t).max(0) as usize;
    let mut seen = vec![false; width * rows];
    let idx = |x: i64, t: i64| (t - big_t) as usize * width + (x - x_lo) as usize;
    let mut out = Vec::new();
    for t in big_t..t_hi {
        for x in x_lo + 1..x_hi {
            if !cell_ok(x, t) || seen[idx(x, t)] {
                continue;
            }
            let mut comp =
                MeshComponent { cells: Vec::new(), bottom_time: t, top_site: None, open: false, tainted: false };
            let mut queue = VecDeque::from([(x, t)]);
            seen[idx(x, t)] = true;
            while let Some((cx, ct)) = queue.pop_front() {
                comp.cells.push((cx, ct));
                for &((dx, dt), (ex, et), right) in &edges {
                    if used(cx + ex, ct + et, right) {
                        continue;
                    }
                    let (nx, nt) = (cx + dx, ct + dt);
                    if nt < big_t {
                        continue;
                    }
                    if nt >= t_hi {
                        comp.open = true;
                        continue;
                    }
                    if nx <= x_lo || nx >= x_hi {
                        comp.tainted = true;
                        continue;
                    }
                    if !seen[idx(nx, nt)] {
                        seen[idx(nx, nt)] = true;
                        queue.push_back((nx, nt));
                    }
                }
            }
            comp.cells.sort_by_key(|&(x, t)| (t, x));
            comp.bottom_time = comp.cells[0].1;
            if comp.is_closed() {
                let &(tx, tt) = comp.cells.last().unwrap();
                comp.top_site = Some((tx, tt + 1));
            }
            out.push(comp);
        }
    }
    Ok(out)
}

/// Walls of a component: the right-most path from the site left of its
/// lowest cells and the left-most path from the site right of them.
/// Returns a description of the first mismatch between the walls and the
/// cells, if any.
pub fn check_component_walls(field: &ArrowField, comp: &MeshComponent) -> Result<(LatticePath, LatticePath)> {
    let b = comp.bottom_time;
    let low: Vec<i64> = comp.cells.iter().filter(|c| c.1 == b).map(|c| c.0).collect();
    let (lo, hi) = (*low.iter().min().unwrap(), *low.iter().max().unwrap());
    let left = rightmost_path(field, (lo - 1, b))?;
    let right = leftmost_path(field, (hi + 1, b))?;
    let cells: BTreeSet<(i64, i64)> = comp.cells.iter().copied().collect();
    let top = comp.cells.last().unwrap().1;
    for t in b..=top {
        let (Some(l), Some(r)) = (left.at(t), right.at(t)) else {
            return Err(Error::Precondition(format!("walls end before time {t}")));
        };
        let expect: BTreeSet<(i64, i64)> = (l + 1..r).filter(|x| (x + t).rem_euclid(2) == 1).map(|x| (x, t)).collect();
        let got: BTreeSet<(i64, i64)> = cells.range((i64::MIN, t)..=(i64::MAX, t)).copied().collect();
        let got: BTreeSet<(i64, i64)> = got.into_iter().filter(|c| c.1 == t).collect();
        if expect != got {
            return Err(Error::Precondition(format!("row {t}: walls {l}..{r} give {expect:?}, component has {got:?}")));
        }
    }
    if let Some((x, t)) = comp.top_site {
        if left.at(t) != Some(x) || right.at(t) != Some(x) {
            return Err(Error::Precondition(format!("walls do not close at ({x},{t})")));
        }
    }
    Ok((left, right))
}

/// Occupied sites above `T` with two occupied incoming arrows.
pub fn coalescence_sites(field: &ArrowField, big_t: i64) -> Result<Vec<(i64, i64)>> {
    let xi = reachable_set(field, big_t)?;
    let mut out = Vec::new();
    for t in big_t + 1..=field.t_hi() {
        for x in field.row_sites(t) {
            let from_left = xi.contains(x - 1, t - 1) && field.get(x - 1, t - 1).unwrap().has_right();
            let from_right = xi.contains(x + 1, t - 1) && field.get(x + 1, t - 1).unwrap().has_left();
            if from_left && from_right {
                out.push((x, t));
            }
        }
    }
    Ok(out)
}

/// Incoming types resolvable on the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IncomingType {
    /// No net path from the look-back time reaches the site.
    Co,
    /// Two occupied incoming arrows.
    Cm,
    /// A branching site with an incoming path.
    Cs,
    /// Reached, single incoming arrow, no branching.
    Cp,
}

/// Classify `z` by the net paths started `lookback` steps earlier (clamped
/// to the bottom of the window).
pub fn incoming_signature(field: &ArrowField, z: (i64, i64), lookback: i64) -> Result<IncomingType> {
    let (x, t) = z;
    let a = field.mask(x, t)?;
    if lookback < 1 {
        return Err(Error::InvalidConfig("lookback must be at least 1".into()));
    }
    let s = (t - lookback).max(field.t_lo());
    if s == t {
        return Ok(IncomingType::Co);
    }
    let xi = reachable_set(field, s)?;
    if !xi.contains(x, t) {
        return Ok(IncomingType::Co);
    }
    if a == Arrow::Both {
        return Ok(IncomingType::Cs);
    }
    let from_left = xi.contains(x - 1, t - 1) && field.get(x - 1, t - 1).unwrap().has_right();
    let from_right = xi.contains(x + 1, t - 1) && field.get(x + 1, t - 1).unwrap().has_left();
    Ok(if from_left && from_right { IncomingType::Cm } else { IncomingType::Cp })
}
