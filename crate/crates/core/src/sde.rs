//! Continuum processes behind the lattice picture: the sticky gap between a
//! left-most and a right-most path, a right-most path reflected off (and
//! eventually crossing) a dual left-most path, and the meeting triple.
//!
//! Reflection at 0 is exact on the grid: the minimum of the driving walk
//! inside a step is drawn from the Brownian-bridge law given its endpoints,
//! so the compensator has the correct law at every grid point.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paths::DualLatticePath;
use crate::rng;
use crate::stats::{mc_mean, proportion, EstimateReport};

/// Minimum of a Brownian bridge from `a` to `b` whose increment has
/// variance `v`, given a uniform `u` in (0, 1].
pub fn bridge_min(a: f64, b: f64, v: f64, u: f64) -> f64 {
    0.5 * (a + b - ((a - b) * (a - b) - 2.0 * v * u.ln()).sqrt())
}

/// Probability that a Brownian bridge from `a > 0` to `b > 0` with increment
/// variance `v` touches 0.
pub fn bridge_hit_probability(a: f64, b: f64, v: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        1.0
    } else if v <= 0.0 {
        0.0
    } else {
        (-2.0 * a * b / v).exp()
    }
}

/// Step minimum, sampled only when it can plausibly go below `level`
/// (otherwise the chance is below e^-20 and the endpoint minimum is used).
fn step_min(a: f64, b: f64, v: f64, level: f64, rng: &mut impl Rng) -> f64 {
    if b <= level || a <= level || 2.0 * (a - level) * (b - level) < 40.0 * v {
        let u: f64 = 1.0 - rng.random::<f64>();
        bridge_min(a, b, v, u)
    } else {
        a.min(b)
    }
}

fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StickyGapConfig {
    /// Real-time horizon.
    pub t_end: f64,
    /// Step of the internal clock τ.
    pub dt: f64,
    pub x0: f64,
    /// Include the `+2τ` drift of the driving walk.
    pub drift: bool,
    /// Reflect at 0 (otherwise the gap is the free driving walk).
    pub reflect: bool,
}

impl StickyGapConfig {
    pub fn new(t_end: f64, dt: f64) -> Self {
        StickyGapConfig { t_end, dt, x0: 0.0, drift: true, reflect: true }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig("t_end must be positive and finite".into()));
        }
        if !(self.dt > 0.0) || self.dt > self.t_end / 100.0 {
            return Err(Error::InvalidConfig(format!(
                "dt = {} must be positive and at most t_end/100 = {}",
                self.dt,
                self.t_end / 100.0
            )));
        }
        if !(self.x0 >= 0.0 && self.x0.is_finite()) {
            return Err(Error::InvalidConfig("x0 must be a non-negative number".into()));
        }
        Ok(())
    }
}

/// One τ-step of the gap: the sticky stretch of real time `½ΔR` at 0 comes
/// first, then `dτ` of reflected motion.
#[derive(Clone, Copy, Debug, Default)]
struct GapState {
    w: f64,
    r: f64,
    t: f64,
}

impl GapState {
    fn x(&self) -> f64 {
        self.w + self.r
    }

    /// Advance by one τ-step; returns the real-time length of the sticky
    /// stretch spent at 0.
    fn step(&mut self, cfg: &StickyGapConfig, rng: &mut impl Rng) -> f64 {
        let v = 2.0 * cfg.dt;
        let drift = if cfg.drift { 2.0 * cfg.dt } else { 0.0 };
        let w1 = self.w + v.sqrt() * normal(rng) + drift;
        let r1 = if cfg.reflect {
            let m = step_min(self.w, w1, v, -self.r, rng);
            self.r.max(-m)
        } else {
            0.0
        };
        let sticky = 0.5 * (r1 - self.r);
        self.w = w1;
        self.r = r1;
        self.t += sticky + cfg.dt;
        sticky
    }
}

/// The gap `D_t = X_{τ(t)}` of a left-most/right-most pair, built as a time
/// change of reflected Brownian motion.
///
/// On the τ-grid: `W_τ = x0 + √2·B_τ + 2τ`, `R_τ = max(0, -inf W)`,
/// `X = W + R`, and real time `t(τ) = τ + ½R_τ`.
#[derive(Clone, Debug, Serialize)]
pub struct StickyGapTrajectory {
    pub dt: f64,
    pub tau: Vec<f64>,
    pub w: Vec<f64>,
    pub local_time: Vec<f64>,
    pub x: Vec<f64>,
    /// Real time `t(τ_k)`.
    pub time: Vec<f64>,
}

impl StickyGapTrajectory {
    fn locate(&self, t: f64) -> Option<usize> {
        if t < 0.0 || t > *self.time.last()? {
            return None;
        }
        // last k with time[k] <= t
        Some(self.time.partition_point(|&s| s <= t).saturating_sub(1))
    }

    /// `D_t`; 0 during sticky stretches, otherwise the value at the end of
    /// the current step.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let k = self.locate(t)?;
        if k + 1 == self.time.len() {
            return Some(self.x[k]);
        }
        let sticky = 0.5 * (self.local_time[k + 1] - self.local_time[k]);
        Some(if t - self.time[k] < sticky { 0.0 } else { self.x[k + 1] })
    }

    /// Real time spent at 0 on `[0, t]`: `½R` up to the current step plus
    /// the part of the current sticky stretch already elapsed.
    pub fn occupation_at_zero(&self, t: f64) -> Option<f64> {
        let k = self.locate(t)?;
        let base = 0.5 * (self.local_time[k] - self.local_time[0]);
        if k + 1 == self.time.len() {
            return Some(base);
        }
        let sticky = 0.5 * (self.local_time[k + 1] - self.local_time[k]);
        Some(base + (t - self.time[k]).min(sticky))
    }

    /// First real time at which the gap is 0.
    pub fn hit_time(&self) -> Option<f64> {
        if self.x[0] == 0.0 {
            return Some(0.0);
        }
        (1..self.x.len()).find(|&k| self.local_time[k] > self.local_time[k - 1]).map(|k| self.time[k - 1])
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,value,aux\n");
        for k in 0..self.x.len() {
            s.push_str(&format!("{},{},{}\n", self.time[k], self.x[k], self.local_time[k]));
        }
        s
    }
}

pub fn simulate_sticky_gap(cfg: &StickyGapConfig, rng: &mut impl Rng) -> Result<StickyGapTrajectory> {
    cfg.validate()?;
    let mut st = GapState { w: cfg.x0, r: 0.0, t: 0.0 };
    let mut traj = StickyGapTrajectory {
        dt: cfg.dt,
        tau: vec![0.0],
        w: vec![st.w],
        local_time: vec![0.0],
        x: vec![st.x()],
        time: vec![0.0],
    };
    let mut k = 0u64;
    while st.t < cfg.t_end {
        st.step(cfg, rng);
        k += 1;
        traj.tau.push(k as f64 * cfg.dt);
        traj.w.push(st.w);
        traj.local_time.push(st.r);
        traj.x.push(st.x());
        traj.time.push(st.t);
    }
    Ok(traj)
}

/// Fraction of real time the gap spends at 0 during `[T_hit, T_hit + s]`
/// for each `s` in `windows`, started at 0 (so `T_hit = 0`).
pub fn sticky_zero_occupation(windows: &[f64], dt: f64, reps: usize, seed: u64) -> Result<Vec<EstimateReport>> {
    let horizon = windows.iter().copied().fold(0.0, f64::max);
    let cfg = StickyGapConfig::new(horizon, dt);
    cfg.validate()?;
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be positive".into()));
    }
    let per_rep: Vec<Vec<f64>> = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::replicate_rng(seed, i);
            let mut st = GapState::default();
            let mut out = vec![f64::NAN; windows.len()];
            let mut zero = 0.0;
            while out.iter().any(|v| v.is_nan()) {
                let t0 = st.t;
                let sticky = st.step(&cfg, &mut rng);
                for (j, &s) in windows.iter().enumerate() {
                    if out[j].is_nan() && st.t >= s {
                        out[j] = (zero + (s - t0).min(sticky)) / s;
                    }
                }
                zero += sticky;
            }
            out
        })
        .collect();
    Ok((0..windows.len()).map(|j| mc_mean(&per_rep.iter().map(|v| v[j]).collect::<Vec<_>>())).collect())
}

/// `P[D_t = 0]` at each of `times`, started at `x0`.
pub fn sticky_zero_probability(times: &[f64], x0: f64, dt: f64, reps: usize, seed: u64) -> Result<Vec<EstimateReport>> {
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let cfg = StickyGapConfig { x0, ..StickyGapConfig::new(horizon, dt) };
    cfg.validate()?;
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be positive".into()));
    }
    let hits: Vec<Vec<bool>> = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::replicate_rng(seed, i);
            let mut st = GapState { w: x0, r: 0.0, t: 0.0 };
            let mut out: Vec<Option<bool>> = vec![None; times.len()];
            while out.iter().any(Option::is_none) {
                let t0 = st.t;
                let sticky = st.step(&cfg, &mut rng);
                for (j, &s) in times.iter().enumerate() {
                    if out[j].is_none() && st.t >= s {
                        out[j] = Some(s - t0 < sticky);
                    }
                }
            }
            out.into_iter().map(Option::unwrap).collect()
        })
        .collect();
    Ok((0..times.len()).map(|j| proportion(hits.iter().filter(|h| h[j]).count() as u64, reps as u64)).collect())
}

/// A barrier the reflected path must stay left of, as a function of time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Barrier {
    Infinite,
    Constant(f64),
    /// Piecewise-linear through `(t, x)` knots sorted by time; undefined
    /// outside their range.
    Knots(Vec<(f64, f64)>),
}

impl Barrier {
    pub fn value(&self, t: f64) -> Option<f64> {
        match self {
            Barrier::Infinite => Some(f64::INFINITY),
            Barrier::Constant(c) => Some(*c),
            Barrier::Knots(k) => {
                let (first, last) = (k.first()?, k.last()?);
                if t < first.0 || t > last.0 {
                    return None;
                }
                let i = k.partition_point(|p| p.0 <= t);
                if i == k.len() {
                    return Some(last.1);
                }
                let (a, b) = (k[i - 1], k[i]);
                Some(a.1 + (t - a.0) / (b.0 - a.0) * (b.1 - a.1))
            }
        }
    }

    /// The rescaled dual path `(ε²t, εx)`, as a function of forward time.
    pub fn from_dual_path(path: &DualLatticePath, epsilon: f64) -> Barrier {
        let mut knots: Vec<(f64, f64)> =
            path.points().map(|(t, x)| (epsilon * epsilon * t as f64, epsilon * x as f64)).collect();
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        Barrier::Knots(knots)
    }

    /// A Brownian path with the given drift started at `x0`, sampled on the
    /// `dt`-grid of `[0, horizon]`.
    pub fn brownian(x0: f64, drift: f64, horizon: f64, dt: f64, rng: &mut impl Rng) -> Barrier {
        let n = (horizon / dt).ceil() as usize;
        let mut knots = Vec::with_capacity(n + 1);
        let mut x = x0;
        knots.push((0.0, x));
        for k in 1..=n {
            x += dt.sqrt() * normal(rng) + drift * dt;
            knots.push((k as f64 * dt, x));
        }
        Barrier::Knots(knots)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReflectCrossConfig {
    pub x0: f64,
    pub t_end: f64,
    pub dt: f64,
    /// Crossing clock; `None` draws it from the exponential law of mean ½.
    pub clock: Option<f64>,
}

/// A right-most path with drift +1 kept left of a barrier by a Skorohod
/// term `Δ`, which crosses once `Δ` exceeds the clock and is then kept
/// right of the barrier.
#[derive(Clone, Debug, Serialize)]
pub struct ReflectCrossTrajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    /// Free walk `W`, drift +1.
    pub w: Vec<f64>,
    /// Skorohod term currently acting (left side before the crossing,
    /// right side after).
    pub delta: Vec<f64>,
    pub r: Vec<f64>,
    pub barrier: Vec<f64>,
    pub clock: f64,
    pub crossed_at: Option<f64>,
    /// `sup (W - l̂) ∨ 0` over the whole run, as if the path never crossed.
    pub delta_uncrossed: f64,
    /// The barrier ran out before `t_end`.
    pub truncated: bool,
}

pub fn simulate_reflect_cross(
    barrier: &Barrier,
    cfg: &ReflectCrossConfig,
    rng: &mut impl Rng,
) -> Result<ReflectCrossTrajectory> {
    if !(cfg.dt > 0.0 && cfg.t_end > 0.0) {
        return Err(Error::InvalidConfig("dt and t_end must be positive".into()));
    }
    let b0 = barrier.value(0.0).ok_or_else(|| Error::InvalidConfig("barrier is not defined at time 0".into()))?;
    if cfg.x0 > b0 {
        return Err(Error::Precondition(format!("start {} is right of the barrier {b0}", cfg.x0)));
    }
    let clock = match cfg.clock {
        Some(c) if c >= 0.0 => c,
        Some(c) => return Err(Error::InvalidConfig(format!("clock {c} is negative"))),
        None => 0.5 * rng.sample::<f64, _>(Exp1),
    };
    let n = (cfg.t_end / cfg.dt).round() as usize;
    let mut tr = ReflectCrossTrajectory {
        dt: cfg.dt,
        times: vec![0.0],
        w: vec![cfg.x0],
        delta: vec![0.0],
        r: vec![cfg.x0],
        barrier: vec![b0],
        clock,
        crossed_at: None,
        delta_uncrossed: 0.0,
        truncated: false,
    };
    let (mut w, mut sup, mut after) = (cfg.x0, 0.0f64, 0.0f64);
    for k in 1..=n {
        let t = k as f64 * cfg.dt;
        let Some(l) = barrier.value(t) else {
            tr.truncated = true;
            break;
        };
        w += cfg.dt.sqrt() * normal(rng) + cfg.dt;
        sup = sup.max(w - l);
        let (d, r) = match tr.crossed_at {
            None if sup > clock => {
                tr.crossed_at = Some(t);
                after = (l - (w - clock)).max(0.0);
                (after, w - clock + after)
            }
            None => (sup, w - sup),
            Some(_) => {
                after = after.max(l - (w - clock));
                (after, w - clock + after)
            }
        };
        tr.times.push(t);
        tr.w.push(w);
        tr.delta.push(d);
        tr.r.push(r);
        tr.barrier.push(l);
    }
    tr.delta_uncrossed = sup;
    Ok(tr)
}

impl ReflectCrossTrajectory {
    /// Sum of Skorohod increments taken while the path was further than
    /// `tol` from the barrier (before the crossing).
    pub fn off_contact_increase(&self, tol: f64) -> f64 {
        let mut total = 0.0;
        for k in 1..self.delta.len() {
            if self.crossed_at.is_some_and(|c| self.times[k] >= c) {
                break;
            }
            let inc = self.delta[k] - self.delta[k - 1];
            if inc > 0.0 && (self.barrier[k] - self.r[k]).abs() >= tol {
                total += inc;
            }
        }
        total
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,value,aux\n");
        for k in 0..self.r.len() {
            s.push_str(&format!("{},{},{}\n", self.times[k], self.r[k], self.barrier[k]));
        }
        s
    }
}

/// Crossing probability by time `t_end`, estimated twice on shared paths:
/// by the crossing indicator and by `E[1 - e^{-2Δ}]`.
pub fn crossing_probability(
    barrier_for: impl Fn(&mut rand_chacha::ChaCha8Rng) -> Barrier + Sync,
    cfg: &ReflectCrossConfig,
    reps: usize,
    seed: u64,
) -> Result<(EstimateReport, EstimateReport)> {
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be positive".into()));
    }
    let runs: Vec<Result<(f64, f64)>> = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::replicate_rng(seed, i);
            let b = barrier_for(&mut rng);
            let tr = simulate_reflect_cross(&b, cfg, &mut rng)?;
            let ind = if tr.crossed_at.is_some() { 1.0 } else { 0.0 };
            Ok((ind, 1.0 - (-2.0 * tr.delta_uncrossed).exp()))
        })
        .collect();
    let runs: Vec<(f64, f64)> = runs.into_iter().collect::<Result<_>>()?;
    let ind: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let closed: Vec<f64> = runs.iter().map(|r| r.1).collect();
    Ok((mc_mean(&ind), mc_mean(&closed)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleConfig {
    /// Initial `X = L' - L`; `Y` starts at 0.
    pub epsilon: f64,
    pub dt: f64,
    pub horizon: f64,
}

impl TripleConfig {
    /// `dt = 10⁻³ε²`, horizon `1000ε²`.
    pub fn scaled(epsilon: f64) -> Self {
        TripleConfig { epsilon, dt: 1e-3 * epsilon * epsilon, horizon: 1e3 * epsilon * epsilon }
    }
}

/// Outcome of one run of the meeting triple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleState {
    pub x: f64,
    pub y: f64,
    /// Real time of `X = Y`, if reached.
    pub tau: Option<f64>,
    /// `Y_τ = 0` (within `√dt`).
    pub absorbed: bool,
    pub censored: bool,
}

/// One real-time step of `(X, Y)`. `Y` is the sticky gap `R - L` built from
/// its τ-clock; `X = L' - L` has quadratic variation 2 per unit real time.
/// During the sticky stretch only `X` moves. In the τ-part
/// `dY = dB^r - dB^l + 2dτ + dR`, `dX = dB^{l'} - dB^l`, so `dX` and the
/// free part of `dY` have correlation ½.
struct TripleStep<'a> {
    cfg: &'a TripleConfig,
}

enum StepOutcome {
    Running,
    /// `X = Y`, with `Y` at 0 or not.
    Met {
        absorbed: bool,
    },
}

#[derive(Clone, Copy, Debug)]
struct TripleVars {
    x: f64,
    w: f64,
    r: f64,
    t: f64,
}

impl TripleStep<'_> {
    fn step(&self, s: &mut TripleVars, rng: &mut impl Rng) -> StepOutcome {
        let dt = self.cfg.dt;
        let sd = dt.sqrt();
        let (a, b, c) = (sd * normal(rng), sd * normal(rng), sd * normal(rng));
        let w1 = s.w + b - a + 2.0 * dt;
        let m = step_min(s.w, w1, 2.0 * dt, -s.r, rng);
        let r1 = s.r.max(-m);
        let dr = r1 - s.r;
        let y0 = s.w + s.r;
        let y1 = w1 + r1;
        s.t += dt + 0.5 * dr;
        // sticky stretch: Y = 0, X diffuses with variance dr
        let mut x = s.x;
        if dr > 0.0 {
            let x1 = x + dr.sqrt() * normal(rng);
            if x1 <= 0.0 || rng.random::<f64>() < bridge_hit_probability(x, x1, dr) {
                s.x = x1;
                s.w = w1;
                s.r = r1;
                return StepOutcome::Met { absorbed: true };
            }
            x = x1;
        }
        let x2 = x + c - a;
        let (z0, z1) = (x - y0, x2 - y1);
        let hit = z1 <= 0.0 || rng.random::<f64>() < bridge_hit_probability(z0, z1, 2.0 * dt);
        s.x = x2;
        s.w = w1;
        s.r = r1;
        if hit {
            StepOutcome::Met { absorbed: y0.min(y1) < sd }
        } else {
            StepOutcome::Running
        }
    }
}

pub fn simulate_meeting_triple(cfg: &TripleConfig, rng: &mut impl Rng) -> Result<TripleState> {
    if !(cfg.epsilon > 0.0 && cfg.dt > 0.0 && cfg.horizon > cfg.dt) {
        return Err(Error::InvalidConfig("need epsilon > 0 and 0 < dt < horizon".into()));
    }
    let stepper = TripleStep { cfg };
    let mut s = TripleVars { x: cfg.epsilon, w: 0.0, r: 0.0, t: 0.0 };
    while s.t < cfg.horizon {
        if let StepOutcome::Met { absorbed } = stepper.step(&mut s, rng) {
            return Ok(TripleState { x: s.x, y: s.w + s.r, tau: Some(s.t), absorbed, censored: false });
        }
    }
    Ok(TripleState { x: s.x, y: s.w + s.r, tau: None, absorbed: false, censored: true })
}

/// `P[Y_τ = 0]` from `(ε, 0)`; censored runs count as not absorbed.
/// Returns the estimate and the number of censored runs.
pub fn meeting_absorption_estimate(cfg: &TripleConfig, reps: usize, seed: u64) -> Result<(EstimateReport, u64)> {
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be positive".into()));
    }
    let runs: Vec<Result<TripleState>> = (0..reps as u64)
        .into_par_iter()
        .map(|i| simulate_meeting_triple(cfg, &mut rng::replicate_rng(seed, i)))
        .collect();
    let runs: Vec<TripleState> = runs.into_iter().collect::<Result<_>>()?;
    let absorbed = runs.iter().filter(|r| r.absorbed).count() as u64;
    let censored = runs.iter().filter(|r| r.censored).count() as u64;
    Ok((proportion(absorbed, reps as u64).with_reference(1.0), censored))
}

/// `(g+f)(x, y) = y/x + 8√x`, and 0 once `x <= 0`.
pub fn supermartingale_value(x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        y / x + 8.0 * x.sqrt()
    }
}

/// Is `(x, y)` in `{0 <= y < x/2, 0 < x < 1}`?
pub fn in_supermartingale_domain(x: f64, y: f64) -> bool {
    0.0 < x && x < 1.0 && 0.0 <= y && y < 0.5 * x
}

/// Sample mean of `(g+f)(X, Y)` stopped on leaving the domain, read at each
/// of `times` (real time), from `(x0, 0)`.
pub fn supermartingale_profile(x0: f64, dt: f64, times: &[f64], reps: usize, seed: u64) -> Result<Vec<EstimateReport>> {
    if !in_supermartingale_domain(x0, 0.0) {
        return Err(Error::InvalidConfig(format!("start ({x0}, 0) is outside the domain")));
    }
    if reps == 0 || times.is_empty() {
        return Err(Error::InvalidConfig("need reps > 0 and at least one time".into()));
    }
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let cfg = TripleConfig { epsilon: x0, dt, horizon };
    let per_rep: Vec<Vec<f64>> = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::replicate_rng(seed, i);
            let stepper = TripleStep { cfg: &cfg };
            let mut s = TripleVars { x: x0, w: 0.0, r: 0.0, t: 0.0 };
            let mut out = vec![f64::NAN; times.len()];
            let mut prev = supermartingale_value(x0, 0.0);
            loop {
                let met = matches!(stepper.step(&mut s, &mut rng), StepOutcome::Met { .. });
                let (x, y) = (s.x, s.w + s.r);
                let v = supermartingale_value(x, y);
                // value at the last grid time not after each reading time
                for (j, &t) in times.iter().enumerate() {
                    if out[j].is_nan() && s.t > t {
                        out[j] = prev;
                    }
                }
                if met || !in_supermartingale_domain(x, y) {
                    for o in out.iter_mut().filter(|o| o.is_nan()) {
                        *o = v;
                    }
                }
                if out.iter().all(|o| !o.is_nan()) {
                    break;
                }
                prev = v;
            }
            out
        })
        .collect();
    Ok((0..times.len()).map(|j| mc_mean(&per_rep.iter().map(|v| v[j]).collect::<Vec<_>>())).collect())
}
