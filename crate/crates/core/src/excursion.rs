//! Excursions of reflected Brownian motion away from 0, their Poisson
//! intensity per unit compensator, and the crossing thinning of those
//! excursions.
//!
//! The compensator `Ψ_t = -inf_{s<=t} B_s` is exact on the grid: the
//! within-step minimum is drawn from the bridge law.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::sde::{bridge_min, simulate_reflect_cross, Barrier, ReflectCrossConfig};
use crate::stats::{mc_mean, EstimateReport};

/// `ν([h, ∞)) = √(2/(πh))`, the tail of `ν(dh) = dh/√(2πh³)`.
pub fn tail_reference(h: f64) -> f64 {
    if h <= 0.0 {
        return f64::INFINITY;
    }
    (2.0 / (std::f64::consts::PI * h)).sqrt()
}

/// Minimum of `B` inside a step, sampled only when it can reach `level`.
fn step_min(a: f64, b: f64, dt: f64, level: f64, rng: &mut impl Rng) -> f64 {
    if b <= level || a <= level || 2.0 * (a - level) * (b - level) < 40.0 * dt {
        bridge_min(a, b, dt, 1.0 - rng.random::<f64>())
    } else {
        a.min(b)
    }
}

/// Brownian motion `B`, its compensator `Ψ` and `X = B + Ψ >= 0` on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReflectedWalk {
    pub dt: f64,
    pub b: Vec<f64>,
    pub psi: Vec<f64>,
    pub x: Vec<f64>,
}

impl ReflectedWalk {
    pub fn simulate(n_steps: usize, dt: f64, rng: &mut impl Rng) -> Result<ReflectedWalk> {
        if !(dt > 0.0) {
            return Err(Error::InvalidConfig("dt must be positive".into()));
        }
        let sd = dt.sqrt();
        let mut walk = ReflectedWalk {
            dt,
            b: Vec::with_capacity(n_steps + 1),
            psi: Vec::with_capacity(n_steps + 1),
            x: Vec::with_capacity(n_steps + 1),
        };
        let (mut b, mut psi) = (0.0f64, 0.0f64);
        walk.b.push(b);
        walk.psi.push(psi);
        walk.x.push(0.0);
        for _ in 0..n_steps {
            let b1 = b + sd * rng.sample::<f64, _>(StandardNormal);
            psi = psi.max(-step_min(b, b1, dt, -psi, rng));
            b = b1;
            walk.b.push(b);
            walk.psi.push(psi);
            walk.x.push(b + psi);
        }
        Ok(walk)
    }

    /// Grid-only reflection of a given path (for hand-made inputs).
    pub fn from_samples(dt: f64, b: Vec<f64>) -> Result<ReflectedWalk> {
        if b.is_empty() || !(dt > 0.0) {
            return Err(Error::InvalidConfig("need samples and dt > 0".into()));
        }
        let mut psi = Vec::with_capacity(b.len());
        let mut m = 0.0f64;
        for &v in &b {
            m = m.max(-v);
            psi.push(m);
        }
        let x = b.iter().zip(&psi).map(|(b, p)| b + p).collect();
        Ok(ReflectedWalk { dt, b, psi, x })
    }

    pub fn horizon(&self) -> f64 {
        (self.b.len() - 1) as f64 * self.dt
    }

    pub fn local_time(&self) -> f64 {
        self.psi.last().unwrap() - self.psi[0]
    }

    /// The walk seen through `(x, t) -> (cx, c²t)`.
    pub fn rescaled(&self, c: f64) -> ReflectedWalk {
        let s = |v: &Vec<f64>| v.iter().map(|x| c * x).collect();
        ReflectedWalk { dt: c * c * self.dt, b: s(&self.b), psi: s(&self.psi), x: s(&self.x) }
    }

    fn is_contact_step(&self, k: usize) -> bool {
        self.psi[k + 1] > self.psi[k]
    }

    /// Time spent in contact: steps in which the compensator grew, plus
    /// steps that stay at 0.
    pub fn contact_time(&self) -> f64 {
        let n = (0..self.b.len() - 1)
            .filter(|&k| self.is_contact_step(k) || (self.x[k] == 0.0 && self.x[k + 1] == 0.0))
            .count();
        n as f64 * self.dt
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcursionRecord {
    /// Grid time of the last contact before the excursion.
    pub start: f64,
    pub duration: f64,
    /// Compensator level during the excursion.
    pub level: f64,
    /// The excursion returned to 0 before the end of the walk.
    pub complete: bool,
}

/// Maximal runs of steps in which the compensator stays flat, also split at
/// grid points where `X = 0`. Runs that never leave 0 are contact time.
pub fn decompose_excursions(walk: &ReflectedWalk) -> Vec<ExcursionRecord> {
    let n = walk.b.len() - 1;
    let mut out = Vec::new();
    let mut k = 0;
    while k < n {
        if walk.is_contact_step(k) {
            k += 1;
            continue;
        }
        let start = k;
        let mut end = k + 1;
        while end < n && !walk.is_contact_step(end) && walk.x[end] != 0.0 {
            end += 1;
        }
        if walk.x[start + 1..=end].iter().any(|&v| v > 0.0) || walk.x[start] > 0.0 {
            let complete = end < n || walk.x[end] == 0.0;
            out.push(ExcursionRecord {
                start: start as f64 * walk.dt,
                duration: (end - start) as f64 * walk.dt,
                level: walk.psi[start],
                complete,
            });
        }
        k = end;
    }
    out
}

/// Excursions of duration at least `h` per unit compensator, against
/// `√(2/(πh))`. Open excursions count once they are already longer than `h`.
pub fn tail_intensity_estimate(records: &[ExcursionRecord], local_time_total: f64, h: f64) -> Result<EstimateReport> {
    if !(local_time_total > 0.0) {
        return Err(Error::InvalidConfig("local time must be positive".into()));
    }
    let count = records.iter().filter(|r| r.duration >= h).count() as f64;
    Ok(EstimateReport::new(count / local_time_total, count.sqrt() / local_time_total, count as u64)
        .with_reference(tail_reference(h)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub h_lo: f64,
    pub h_hi: f64,
    pub count: u64,
    pub local_time: f64,
    pub estimate: f64,
    pub reference: f64,
}

/// Duration histogram on geometric buckets `[h0·4^k, h0·4^{k+1})`.
pub fn histogram(records: &[ExcursionRecord], local_time: f64, h0: f64, buckets: usize) -> Vec<HistogramRow> {
    (0..buckets)
        .map(|k| {
            let h_lo = h0 * 4f64.powi(k as i32);
            let h_hi = 4.0 * h_lo;
            let count = records.iter().filter(|r| r.complete && r.duration >= h_lo && r.duration < h_hi).count() as u64;
            HistogramRow {
                h_lo,
                h_hi,
                count,
                local_time,
                estimate: count as f64 / local_time,
                reference: tail_reference(h_lo) - tail_reference(h_hi),
            }
        })
        .collect()
}

pub fn histogram_csv(rows: &[HistogramRow]) -> String {
    let mut s = String::from("h_lo,h_hi,count,local_time,estimate,reference\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{},{},{}\n", r.h_lo, r.h_hi, r.count, r.local_time, r.estimate, r.reference));
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailConfig {
    pub hs: Vec<f64>,
    pub dt: f64,
    /// Total compensator to accumulate.
    pub local_time: f64,
    /// Excursions reaching this length are counted as long and the walk is
    /// restarted at 0.
    pub cap: f64,
    /// Independent streams the budget is split over.
    pub chunks: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub local_time: f64,
    pub steps: u64,
    pub rows: Vec<(f64, EstimateReport)>,
}

/// Stream a reflected walk until the compensator budget is spent, counting
/// excursions of length at least each `h`. Never stores the walk.
///
/// An excursion still running at length `cap` is counted for every
/// `h <= cap` and the walk restarts at 0; since excursions form a Poisson
/// process in compensator time, cutting one short does not change the law
/// of the others.
pub fn excursion_tail_counts(cfg: &TailConfig) -> Result<TailReport> {
    if cfg.hs.iter().any(|&h| !(h > 0.0) || h > cfg.cap) {
        return Err(Error::InvalidConfig("every h must lie in (0, cap]".into()));
    }
    if !(cfg.dt > 0.0 && cfg.local_time > 0.0 && cfg.chunks > 0) {
        return Err(Error::InvalidConfig("need dt > 0, local time > 0 and chunks > 0".into()));
    }
    let steps_of = |h: f64| (h / cfg.dt).round() as u64;
    let h_steps: Vec<u64> = cfg.hs.iter().map(|&h| steps_of(h)).collect();
    let cap_steps = steps_of(cfg.cap);
    let budget = cfg.local_time / cfg.chunks as f64;
    let sd = cfg.dt.sqrt();
    let parts: Vec<(Vec<u64>, f64, u64)> = (0..cfg.chunks as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::replicate_rng(cfg.seed, i);
            let mut counts = vec![0u64; h_steps.len()];
            let (mut b, mut psi) = (0.0f64, 0.0f64);
            let mut run = 0u64;
            let mut steps = 0u64;
            let close = |len: u64, counts: &mut Vec<u64>| {
                for (c, &hs) in counts.iter_mut().zip(&h_steps) {
                    if len >= hs {
                        *c += 1;
                    }
                }
            };
            while psi < budget {
                let b1 = b + sd * rng.sample::<f64, _>(StandardNormal);
                let m = step_min(b, b1, cfg.dt, -psi, &mut rng);
                steps += 1;
                if -m > psi {
                    psi = -m;
                    if run > 0 {
                        close(run, &mut counts);
                    }
                    run = 0;
                } else {
                    run += 1;
                    if run >= cap_steps {
                        close(run, &mut counts);
                        run = 0;
                        b = -psi;
                        continue;
                    }
                }
                b = b1;
            }
            (counts, psi, steps)
        })
        .collect();
    let total: f64 = parts.iter().map(|p| p.1).sum();
    let steps: u64 = parts.iter().map(|p| p.2).sum();
    let rows = cfg
        .hs
        .iter()
        .enumerate()
        .map(|(j, &h)| {
            let count: u64 = parts.iter().map(|p| p.0[j]).sum();
            let c = count as f64;
            (h, EstimateReport::new(c / total, c.sqrt() / total, count).with_reference(tail_reference(h)))
        })
        .collect();
    Ok(TailReport { local_time: total, steps, rows })
}

/// Bucket counts between consecutive thresholds of a tail run.
pub fn histogram_from_tail(tail: &TailReport) -> Vec<HistogramRow> {
    tail.rows
        .windows(2)
        .map(|w| {
            let ((h_lo, lo), (h_hi, hi)) = (&w[0], &w[1]);
            let count = lo.n.saturating_sub(hi.n);
            HistogramRow {
                h_lo: *h_lo,
                h_hi: *h_hi,
                count,
                local_time: tail.local_time,
                estimate: count as f64 / tail.local_time,
                reference: tail_reference(*h_lo) - tail_reference(*h_hi),
            }
        })
        .collect()
}

/// Sample one excursion of duration in `[lo, hi)` by running a reflected
/// walk from 0 and rejecting the others. Returns the excursion values on
/// the `dt`-grid, starting and ending at 0, and the number rejected.
pub fn sample_excursion(lo: f64, hi: f64, dt: f64, rng: &mut impl Rng) -> (Vec<f64>, u64) {
    let sd = dt.sqrt();
    let (lo_steps, hi_steps) = ((lo / dt).round() as usize, (hi / dt).round() as usize);
    let mut rejected = 0;
    let (mut b, mut psi) = (0.0f64, 0.0f64);
    let mut cur: Vec<f64> = vec![0.0];
    loop {
        let b1 = b + sd * rng.sample::<f64, _>(StandardNormal);
        let m = step_min(b, b1, dt, -psi, rng);
        if -m > psi {
            psi = -m;
            let len = cur.len() - 1;
            if len >= lo_steps && len < hi_steps {
                cur.push(0.0);
                return (cur, rejected);
            }
            if len > 0 {
                rejected += 1;
            }
            cur.clear();
            cur.push(0.0);
        } else {
            cur.push(b1 + psi);
            if cur.len() > hi_steps {
                rejected += 1;
                cur.clear();
                cur.push(0.0);
                b = -psi;
                continue;
            }
        }
        b = b1;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThinningReport {
    pub h: f64,
    /// `ρ(h)/√h` from the crossing indicator.
    pub indicator: EstimateReport,
    /// `ρ(h)/√h` from `E[1 - e^{-2Δ}]` on the same paths.
    pub closed_form: EstimateReport,
    pub rejected: u64,
}

/// `ρ(h)`: probability that a right-most path with drift +1, started at
/// the barrier and reflected to the left off `L = B_t - t - F_h/√2`,
/// accrues Skorohod local time beyond an independent mean-½ exponential
/// clock during an excursion `F_h` of duration in `[h/2, 2h)`. Reported as
/// `ρ(h)/√h`. `clock` forces the clock instead of sampling it.
pub fn crossing_thinning_estimate(h: f64, reps: usize, seed: u64, clock: Option<f64>) -> Result<ThinningReport> {
    if !(h > 0.0) || reps == 0 {
        return Err(Error::InvalidConfig("need h > 0 and reps > 0".into()));
    }
    let dt = h / 2000.0;
    let runs: Vec<Result<(f64, f64, u64)>> = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::replicate_rng(seed, i);
            let (f, rejected) = sample_excursion(0.5 * h, 2.0 * h, dt, &mut rng);
            let mut knots = Vec::with_capacity(f.len());
            let mut b = 0.0f64;
            for (k, &fv) in f.iter().enumerate() {
                if k > 0 {
                    b += dt.sqrt() * rng.sample::<f64, _>(StandardNormal);
                }
                let t = k as f64 * dt;
                knots.push((t, b - t - fv / std::f64::consts::SQRT_2));
            }
            let cfg = ReflectCrossConfig { x0: 0.0, t_end: (f.len() - 1) as f64 * dt, dt, clock };
            let tr = simulate_reflect_cross(&Barrier::Knots(knots), &cfg, &mut rng)?;
            let ind = if tr.crossed_at.is_some() { 1.0 } else { 0.0 };
            Ok((ind, 1.0 - (-2.0 * tr.delta_uncrossed).exp(), rejected))
        })
        .collect();
    let runs: Vec<(f64, f64, u64)> = runs.into_iter().collect::<Result<_>>()?;
    let scale = 1.0 / h.sqrt();
    let ind: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let closed: Vec<f64> = runs.iter().map(|r| r.1).collect();
    Ok(ThinningReport {
        h,
        indicator: mc_mean(&ind).scaled(scale),
        closed_form: mc_mean(&closed).scaled(scale),
        rejected: runs.iter().map(|r| r.2).sum(),
    })
}
