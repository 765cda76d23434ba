//! Acceptance runs, one PASS/FAIL line each. Pass criterion numbers as
//! arguments to run a subset: `cargo test --release --test acceptance -- 4 9`.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bnet::classify::{
    census, relevant_density_estimate, xi_density_estimate, RelevantDensityConfig, SiteKind, XiDensityConfig,
};
use bnet::excursion::{excursion_tail_counts, tail_reference, TailConfig};
use bnet::invariants::run_suite;
use bnet::lattice::{contact_kernel_sample, transition_kernel_check};
use bnet::sde::{meeting_absorption_estimate, sticky_zero_occupation, sticky_zero_probability, TripleConfig};
use bnet::stats::{psi, relevant_density_integral};
use bnet::{sample_arrow_field, LatticeConfig, Result};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn within_budget(elapsed: Duration, minutes: u64) -> bool {
    elapsed <= Duration::from_secs(60 * minutes)
}

fn xi_density(start: Instant) -> Result<Verdict> {
    let est = xi_density_estimate(&XiDensityConfig { epsilon: 0.05, time: 1.0, width: 40.0, reps: 200, seed: 101 })?;
    let reference = psi(1.0);
    let ok = (est.estimate - reference).abs() <= 0.05 * reference && within_budget(start.elapsed(), 5);
    verdict(
        ok,
        format!(
            "density {:.4} ± {:.4} vs Ψ(1) = {reference:.6}, ratio {:.4}, tolerance 5%",
            est.estimate,
            est.stderr,
            est.estimate / reference
        ),
    )
}

fn relevant_density(start: Instant) -> Result<Verdict> {
    let cfg = RelevantDensityConfig { epsilon: 0.05, s: 0.0, u: 1.0, a: 0.0, b: 1.0, reps: 500, seed: 102 };
    let est = relevant_density_estimate(&cfg)?;
    let reference = relevant_density_integral(0.0, 0.0, 1.0, 1.0, 0.0, 1.0)?;
    let ok = (est.estimate - reference).abs() <= 0.15 * reference && within_budget(start.elapsed(), 15);
    verdict(
        ok,
        format!(
            "count {:.3} ± {:.3} vs integral {reference:.4}, ratio {:.4}, tolerance 15%{}",
            est.estimate,
            est.stderr,
            est.estimate / reference,
            if est.tainted { ", tainted" } else { "" }
        ),
    )
}

fn excursion_intensity(start: Instant) -> Result<Verdict> {
    let cfg = TailConfig { hs: vec![0.01, 0.1, 1.0], dt: 1e-6, local_time: 5000.0, cap: 1.0, chunks: 16, seed: 103 };
    let tail = excursion_tail_counts(&cfg)?;
    let mut ok = within_budget(start.elapsed(), 5);
    let mut parts = Vec::new();
    for (h, r) in &tail.rows {
        let reference = tail_reference(*h);
        ok &= (r.estimate - reference).abs() <= 0.05 * reference;
        parts.push(format!("h={h}: {:.4}/{reference:.4} = {:.4}", r.estimate, r.estimate / reference));
    }
    verdict(ok, format!("{}; local time {:.0}, {} steps, tolerance 5%", parts.join(", "), tail.local_time, tail.steps))
}

fn crossing_kernel(_: Instant) -> Result<Verdict> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, eps) in [0.01, 0.2, 0.5, 1.0].into_iter().enumerate() {
        let exact = 2.0 * eps / (1.0 + eps);
        let table = transition_kernel_check(eps);
        ok &= (table.left_contact_right - exact).abs() < 1e-12;
        let s = contact_kernel_sample(eps, 1_000_000, 104 + k as u64)?;
        let z = (s.frequency() - exact) / s.stderr().max(f64::MIN_POSITIVE);
        ok &= s.events >= 1_000_000 && (s.stderr() == 0.0 && s.frequency() == exact || z.abs() <= 4.0);
        parts.push(format!("ε={eps}: {:.5} vs {exact:.5} ({} events, z={z:.2})", s.frequency(), s.events));
    }
    verdict(ok, parts.join(", "))
}

fn stickiness(_: Instant) -> Result<Verdict> {
    let occ = sticky_zero_occupation(&[1e-3, 1e-1], 1e-6, 10_000, 105)?;
    let ok = occ[0].estimate > 0.9 && occ[0].estimate > occ[1].estimate;
    verdict(
        ok,
        format!(
            "fraction at 0: t=1e-3 {:.4} ± {:.4}, t=1e-1 {:.4} ± {:.4}; need > 0.9 and decreasing",
            occ[0].estimate, occ[0].stderr, occ[1].estimate, occ[1].stderr
        ),
    )
}

fn monotonicity(_: Instant) -> Result<Verdict> {
    let times = [0.1, 0.2, 0.4, 0.8];
    let p = sticky_zero_probability(&times, 0.0, 1e-4, 10_000, 106)?;
    let ok = p.windows(2).all(|w| {
        let se = (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        w[1].estimate <= w[0].estimate + 3.0 * se
    });
    let vals: Vec<String> = times.iter().zip(&p).map(|(t, r)| format!("{t}: {:.4}", r.estimate)).collect();
    verdict(ok, format!("P[D_t = 0] {}; tolerance 3 combined SE", vals.join(", ")))
}

fn meeting_absorption(_: Instant) -> Result<Verdict> {
    let mut rows = Vec::new();
    for (k, eps) in [0.4, 0.2, 0.1, 0.05].into_iter().enumerate() {
        let (est, censored) = meeting_absorption_estimate(&TripleConfig::scaled(eps), 40_000, 107 + k as u64)?;
        rows.push((eps, est, censored));
    }
    let increasing = rows.windows(2).all(|w| w[1].1.estimate > w[0].1.estimate);
    let last = rows.last().unwrap().1.estimate;
    let vals: Vec<String> =
        rows.iter().map(|(e, r, c)| format!("ε={e}: {:.4} ± {:.4} ({c} censored)", r.estimate, r.stderr)).collect();
    verdict(increasing && last > 0.8, format!("{}; need increasing and last > 0.8", vals.join(", ")))
}

fn invariant_suite(start: Instant) -> Result<Verdict> {
    let report = run_suite(500, &[0.0, 0.1, 0.5, 1.0], 108)?;
    let elapsed = start.elapsed();
    let names: BTreeSet<_> = report.failures.iter().map(|f| f.check).collect();
    verdict(
        report.passed() && within_budget(elapsed, 2),
        format!(
            "{} cases, {} checks, {} failures {names:?}, {:.1}s (budget 120s)",
            report.cases,
            report.checks.len(),
            report.failures.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn census_tags(_: Instant) -> Result<Verdict> {
    let mut sites = 0usize;
    let mut kinds = BTreeSet::new();
    let mut mismatches = 0usize;
    for seed in 0..200u64 {
        let eps = [0.1, 0.5, 1.0][seed as usize % 3];
        let field = sample_arrow_field(&LatticeConfig::new(eps, -10, 10, 0, 10, 109 + seed).with_margin(11))?;
        for r in census(&field)? {
            sites += 1;
            kinds.insert(r.kind);
            if r.crossing != (r.kind == SiteKind::Separation) {
                mismatches += 1;
            }
        }
    }
    let allowed: BTreeSet<_> = [SiteKind::Plain, SiteKind::Meeting, SiteKind::Separation].into();
    verdict(
        kinds.is_subset(&allowed) && mismatches == 0,
        format!("{sites} sites, tags {kinds:?}, {mismatches} sites where crossing and separation disagree"),
    )
}

type Criterion = (u32, &'static str, fn(Instant) -> Result<Verdict>);

const CRITERIA: [Criterion; 9] = [
    (1, "point-set density vs Ψ", xi_density),
    (2, "relevant separation density", relevant_density),
    (3, "excursion intensity", excursion_intensity),
    (4, "discrete crossing kernel", crossing_kernel),
    (5, "sticky gap stickiness", stickiness),
    (6, "sticky gap monotonicity", monotonicity),
    (7, "meeting point absorption", meeting_absorption),
    (8, "structural invariant suite", invariant_suite),
    (9, "census tags", census_tags),
];

fn main() -> ExitCode {
    let wanted: BTreeSet<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, run) in CRITERIA {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match run(start) {
            Ok(v) => (v.pass, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        println!("{} criterion {n} ({name}): {detail} [{secs:.1}s]", if pass { "PASS" } else { "FAIL" });
        failed += (!pass) as u32;
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
