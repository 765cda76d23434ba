use bnet::rng::replicate_rng;
use bnet::stats::{
    integrate, mc_mean, normal_cdf, pairwise_sum, proportion, psi, psi_sqrt_weighted, relevant_density_integral,
};
use bnet::{Error, EstimateReport};
use rand::Rng;

fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|k| f(a + (k as f64 + 0.5) * h)).sum::<f64>() * h
}

#[test]
#[allow(clippy::approx_constant)]
fn normal_cdf_values() {
    assert_eq!(normal_cdf(0.0), 0.5);
    assert!((normal_cdf(1.414214) - 0.921_350).abs() < 1e-6);
    assert!((normal_cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-12);
    for x in [-3.0, -0.7, 0.2, 2.5] {
        assert!((normal_cdf(x) + normal_cdf(-x) - 1.0).abs() < 1e-15);
    }
}

#[test]
fn psi_values_and_limits() {
    assert!((psi(1.0) - 2.050_254).abs() < 1e-6);
    assert_eq!(psi(0.0), f64::INFINITY);
    assert_eq!(psi(f64::INFINITY), 2.0);
    assert!(psi(-1.0).is_nan());
    assert!((psi(60.0) - 2.0).abs() < 1e-12);
    for t in [1e-10, 1e-12] {
        let p = psi(t);
        assert!((t * p * p - 1.0 / std::f64::consts::PI).abs() < 1e-4);
    }
    let mut prev = f64::INFINITY;
    for k in 1..=200 {
        let t = k as f64 * 0.1;
        let p = psi(t);
        assert!(p > 2.0 && p < prev, "t = {t}");
        prev = p;
    }
}

#[test]
fn weighted_psi_matches_direct_form() {
    for k in 1..100 {
        let v = k as f64 * 0.03;
        assert!((psi_sqrt_weighted(v) - 2.0 * v * psi(v * v)).abs() < 1e-12 * psi_sqrt_weighted(v));
    }
    assert!((psi_sqrt_weighted(0.0) - 2.0 / std::f64::consts::PI.sqrt()).abs() < 1e-15);
}

#[test]
fn quadrature_on_known_integrals() {
    assert!((integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-12) - 2.0).abs() < 1e-12);
    assert!((integrate(|x| (-x * x).exp(), -6.0, 6.0, 1e-12) - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    assert_eq!(integrate(|x| x, 1.0, 1.0, 1e-9), 0.0);
}

/// `∫_0^1 Ψ(t)Ψ(1-t) dt` by the midpoint rule after `t = v²` on each half.
fn unit_box_oracle() -> f64 {
    let half = 0.5f64.sqrt();
    2.0 * midpoint(|v| 2.0 * v * psi(v * v) * psi(1.0 - v * v), 0.0, half, 1_000_000)
}

#[test]
fn relevant_density_integral_against_midpoint() {
    let ours = relevant_density_integral(0.0, 0.0, 1.0, 1.0, 0.0, 1.0).unwrap();
    assert!((ours - 11.886_419_752_539_613).abs() < 1e-9);
    assert!((ours - 2.0 * unit_box_oracle()).abs() < 1e-4);

    let mut rng = replicate_rng(17, 0);
    for _ in 0..20 {
        let big_s = rng.random::<f64>() - 1.0;
        let s = big_s + 0.05 + rng.random::<f64>();
        let u = s + 0.05 + rng.random::<f64>();
        let big_u = u + 0.05 + rng.random::<f64>();
        let (a, b) = (-rng.random::<f64>(), rng.random::<f64>());
        let ours = relevant_density_integral(big_s, s, u, big_u, a, b).unwrap();
        let oracle = 2.0 * (b - a) * midpoint(|t| psi(t - big_s) * psi(big_u - t), s, u, 200_000);
        assert!((ours - oracle).abs() < 1e-6 * oracle, "{ours} vs {oracle}");
    }
}

#[test]
fn relevant_density_integral_edge_cases() {
    // both ends at infinity: density 2·2 everywhere
    let v = relevant_density_integral(f64::NEG_INFINITY, 0.0, 3.0, f64::INFINITY, 0.0, 0.5).unwrap();
    assert!((v - 2.0 * 0.5 * 4.0 * 3.0).abs() < 1e-8);
    assert_eq!(relevant_density_integral(0.0, 1.0, 1.0, 2.0, 0.0, 1.0).unwrap(), 0.0);
    assert_eq!(relevant_density_integral(0.0, 0.5, 1.0, 2.0, 1.0, 1.0).unwrap(), 0.0);
    for args in [(1.0, 0.5, 1.0, 2.0), (0.0, 1.0, 0.5, 2.0), (0.0, 0.5, 1.0, 0.8)] {
        let r = relevant_density_integral(args.0, args.1, args.2, args.3, 0.0, 1.0);
        assert!(matches!(r, Err(Error::InvalidConfig(_))));
    }
    assert!(relevant_density_integral(0.0, 0.5, f64::NAN, 2.0, 0.0, 1.0).is_err());
}

#[test]
fn mean_and_proportion() {
    let v: Vec<f64> = (0..1000).map(|k| (k % 2) as f64).collect();
    let m = mc_mean(&v);
    assert_eq!(m.estimate, 0.5);
    assert!((m.stderr - 0.015_819).abs() < 1e-6);
    assert_eq!(m.n, 1000);
    assert!(mc_mean(&[]).estimate.is_nan());
    assert_eq!(mc_mean(&[3.0]).stderr, 0.0);
    let p = proportion(25, 100);
    assert_eq!(p.estimate, 0.25);
    assert!((p.stderr - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
    assert!(proportion(0, 0).estimate.is_nan());
}

#[test]
fn report_helpers() {
    let r = EstimateReport::new(1.1, 0.05, 10).with_reference(1.0);
    assert!((r.ratio.unwrap() - 1.1).abs() < 1e-15);
    assert!(r.within_relative(0.11) && !r.within_relative(0.09));
    assert!((r.z_score().unwrap() - 2.0).abs() < 1e-12);
    let s = r.scaled(2.0);
    assert!((s.estimate - 2.2).abs() < 1e-15 && (s.stderr - 0.1).abs() < 1e-15);
    assert!((s.ratio.unwrap() - 2.2).abs() < 1e-12);
    assert_eq!(EstimateReport::new(1.0, 0.0, 1).with_reference(0.0).ratio, None);
    assert!(!EstimateReport::new(1.0, 0.0, 1).within_relative(1.0));
}

#[test]
fn pairwise_sum_is_accurate() {
    let v: Vec<f64> = (0..100_000).map(|k| 0.1 + (k % 7) as f64 * 1e-3).collect();
    let exact: f64 = (0..100_000).map(|k| 0.1 + (k % 7) as f64 * 1e-3).sum();
    assert!((pairwise_sum(&v) - exact).abs() < 1e-6);
}
