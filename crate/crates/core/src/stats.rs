//! Analytic references and estimator plumbing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Monte Carlo estimate together with the value it is meant to reproduce.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate: f64,
    pub stderr: f64,
    pub n: u64,
    pub reference: Option<f64>,
    pub ratio: Option<f64>,
    /// Set when some replicate touched the edge of its window.
    pub tainted: bool,
}

impl EstimateReport {
    pub fn new(estimate: f64, stderr: f64, n: u64) -> Self {
        EstimateReport { estimate, stderr, n, reference: None, ratio: None, tainted: false }
    }

    pub fn with_reference(mut self, reference: f64) -> Self {
        self.reference = Some(reference);
        self.ratio = if reference != 0.0 { Some(self.estimate / reference) } else { None };
        self
    }

    pub fn with_taint(mut self, tainted: bool) -> Self {
        self.tainted = tainted;
        self
    }

    /// Multiply estimate and standard error by a constant (reference is kept).
    pub fn scaled(mut self, c: f64) -> Self {
        self.estimate *= c;
        self.stderr *= c.abs();
        if let Some(r) = self.reference {
            self = self.with_reference(r);
        }
        self
    }

    /// `|estimate - reference| <= tol * |reference|`.
    pub fn within_relative(&self, tol: f64) -> bool {
        match self.reference {
            Some(r) => (self.estimate - r).abs() <= tol * r.abs(),
            None => false,
        }
    }

    /// Distance to the reference in standard errors.
    pub fn z_score(&self) -> Option<f64> {
        let r = self.reference?;
        if self.stderr > 0.0 {
            Some((self.estimate - r) / self.stderr)
        } else if self.estimate == r {
            Some(0.0)
        } else {
            Some(f64::INFINITY)
        }
    }
}

/// Pairwise (cascade) summation; the result depends only on the order of
/// `values`, never on how the work producing them was scheduled.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Sample mean with standard error `sd / sqrt(n)`.
///
/// An empty slice gives `n = 0` with NaN estimate and standard error.
pub fn mc_mean(values: &[f64]) -> EstimateReport {
    let n = values.len();
    if n == 0 {
        return EstimateReport::new(f64::NAN, f64::NAN, 0);
    }
    let mean = pairwise_sum(values) / n as f64;
    if n == 1 {
        return EstimateReport::new(mean, 0.0, 1);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n as f64 - 1.0);
    EstimateReport::new(mean, (var / n as f64).sqrt(), n as u64)
}

/// Binomial proportion with standard error `sqrt(p(1-p)/n)`.
pub fn proportion(successes: u64, n: u64) -> EstimateReport {
    if n == 0 {
        return EstimateReport::new(f64::NAN, f64::NAN, 0);
    }
    let p = successes as f64 / n as f64;
    EstimateReport::new(p, (p * (1.0 - p) / n as f64).sqrt(), n)
}

/// Standard normal distribution function, via the libm `erfc`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// `Ψ(t) = e^{-t}/√(πt) + 2Φ(√(2t))`, the density of the net started from
/// the whole line after time `t`. `Ψ(∞) = 2`, `Ψ(0) = ∞`.
pub fn psi(t: f64) -> f64 {
    if t.is_nan() || t < 0.0 {
        return f64::NAN;
    }
    if t == 0.0 {
        return f64::INFINITY;
    }
    if t.is_infinite() {
        return 2.0;
    }
    (-t).exp() / (std::f64::consts::PI * t).sqrt() + 2.0 * normal_cdf((2.0 * t).sqrt())
}

/// `2v·Ψ(v²)`, the integrand weight after substituting `t = v²`; smooth at 0.
pub fn psi_sqrt_weighted(v: f64) -> f64 {
    2.0 * (-v * v).exp() / std::f64::consts::PI.sqrt() + 4.0 * v * normal_cdf(std::f64::consts::SQRT_2 * v)
}

// 15-point Kronrod nodes/weights and the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod quadrature on a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, whole: f64, depth: u32) -> f64 {
        let (k, err) = gk15(f, a, b);
        if err <= tol || depth == 0 || err <= 1e-15 * whole.abs() {
            return k;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, whole, depth - 1) + rec(f, m, b, 0.5 * tol, whole, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let (whole, _) = gk15(&f, a, b);
    let tol = (rel_tol * whole.abs()).max(1e-300);
    rec(&f, a, b, tol, whole, 40)
}

/// `2(b−a) ∫_s^u Ψ(t−S) Ψ(U−t) dt`, the expected number of `(S,U)`-relevant
/// separation points in `[a,b] × [s,u]`.
///
/// The interval is split at its midpoint; near `S` the substitution
/// `t = S + v²` and near `U` the substitution `t = U − w²` remove the
/// inverse-square-root singularities. `S = -∞` and `U = +∞` are allowed.
pub fn relevant_density_integral(big_s: f64, s: f64, u: f64, big_u: f64, a: f64, b: f64) -> Result<f64> {
    if !(s.is_finite() && u.is_finite() && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidConfig("s, u, a, b must be finite".into()));
    }
    if big_s.is_nan() || big_u.is_nan() || big_s > s || s > u || u > big_u || a > b {
        return Err(Error::InvalidConfig(format!(
            "need S <= s <= u <= U and a <= b, got S={big_s} s={s} u={u} U={big_u} a={a} b={b}"
        )));
    }
    if s == u || a == b {
        return Ok(0.0);
    }
    const REL: f64 = 1e-10;
    let m = 0.5 * (s + u);
    let left = if big_s.is_finite() {
        let g = |v: f64| psi_sqrt_weighted(v) * psi(big_u - big_s - v * v);
        integrate(g, (s - big_s).sqrt(), (m - big_s).sqrt(), REL)
    } else {
        integrate(|t: f64| 2.0 * psi(big_u - t), s, m, REL)
    };
    let right = if big_u.is_finite() {
        let g = |w: f64| psi_sqrt_weighted(w) * psi(big_u - big_s - w * w);
        integrate(g, (big_u - u).sqrt(), (big_u - m).sqrt(), REL)
    } else {
        integrate(|t: f64| psi(t - big_s) * 2.0, m, u, REL)
    };
    Ok(2.0 * (b - a) * (left + right))
}
