//! Command-line harness. Each subcommand is a pure function of its
//! effective [`RunConfig`]: built-in defaults, then a JSON `--config` file,
//! then flags. The effective config is echoed into every JSON report.
//!
//! Replicate `i` of a run with seed `s` draws from the stream keyed by
//! `(s, i)`, so results do not depend on the worker count. `BNET_THREADS`
//! sets that count.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::classify::{self, RelevantDensityConfig, XiDensityConfig};
use crate::error::{Error, Result};
use crate::excursion::{self, TailConfig};
use crate::invariants;
use crate::lattice::{sample_arrow_field, LatticeConfig};
use crate::oracle;
use crate::rng;
use crate::sde::{self, Barrier, ReflectCrossConfig, StickyGapConfig, TripleConfig};
use crate::stats::EstimateReport;

#[derive(Parser, Debug)]
#[command(name = "bnet", version, about = "Brownian net lattice experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dump a sampled arrow field. Uses --epsilon, the window and --seed.
    Sample(Flags),
    /// Classify every resolvable site of a sampled field (CSV by default).
    Census(Flags),
    /// Density of the point set started from every site, against Ψ(t).
    /// Uses --epsilon --time --width --reps. With --epsilon 0 or --lattice
    /// it instead compares the mean top-row occupancy of the window with
    /// exhaustive enumeration (at most 14 sites below the top row).
    DensityPsi(Flags),
    /// Relevant separation points in [a,b) × (s,u). Uses --epsilon --s --u
    /// --a --b --reps.
    RelevantDensity(Flags),
    /// Mesh components above --mesh-time (default: bottom of the window).
    TMesh(Flags),
    /// Excursion counts per unit compensator for durations --h. Uses --dt
    /// --local-time --cap.
    Excursions(Flags),
    /// Crossing thinning ρ(h)/√h for buckets --h. Uses --reps and --clock.
    CrossThinning(Flags),
    /// Sticky gap: zero occupation after the hit over --windows and
    /// P[D_t = 0] at --times (JSON), or one trajectory (CSV). Uses --dt --reps --x0 --horizon.
    Sticky(Flags),
    /// Meeting-triple absorption at each of --epsilons. Uses --reps.
    Meeting(Flags),
    /// Reflect-and-cross against a Brownian barrier: crossing probability
    /// (JSON) or one trajectory (CSV). Uses --x0 --horizon --dt --reps --clock.
    ReflectCross(Flags),
    /// Property suite on random small windows. Uses --cases --epsilons --seed.
    Invariants(Flags),
}

impl Command {
    fn parts(&self) -> (&'static str, &Flags) {
        match self {
            Command::Sample(f) => ("sample", f),
            Command::Census(f) => ("census", f),
            Command::DensityPsi(f) => ("density-psi", f),
            Command::RelevantDensity(f) => ("relevant-density", f),
            Command::TMesh(f) => ("t-mesh", f),
            Command::Excursions(f) => ("excursions", f),
            Command::CrossThinning(f) => ("cross-thinning", f),
            Command::Sticky(f) => ("sticky", f),
            Command::Meeting(f) => ("meeting", f),
            Command::ReflectCross(f) => ("reflect-cross", f),
            Command::Invariants(f) => ("invariants", f),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Default)]
pub struct Flags {
    /// JSON file with any RunConfig fields; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x_lo: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x_hi: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_lo: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_hi: Option<i64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub time: Option<f64>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub u: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub h: Option<Vec<f64>>,
    #[arg(long)]
    pub local_time: Option<f64>,
    #[arg(long)]
    pub cap: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub clock: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub windows: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    #[arg(long)]
    pub cases: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub mesh_time: Option<i64>,
    /// Occupancy-vs-enumeration mode for density-psi.
    #[arg(long)]
    pub lattice: bool,
    /// Exit 1 when the run misses its acceptance threshold.
    #[arg(long)]
    pub check: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: String,
    pub epsilon: f64,
    pub x_lo: i64,
    pub x_hi: i64,
    pub t_lo: i64,
    pub t_hi: i64,
    pub seed: u64,
    pub reps: usize,
    pub dt: f64,
    pub horizon: f64,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub time: f64,
    pub width: f64,
    pub s: f64,
    pub u: f64,
    pub a: f64,
    pub b: f64,
    pub h: Option<Vec<f64>>,
    pub local_time: f64,
    pub cap: f64,
    pub x0: f64,
    pub clock: Option<f64>,
    pub windows: Option<Vec<f64>>,
    pub times: Option<Vec<f64>>,
    pub cases: usize,
    pub epsilons: Option<Vec<f64>>,
    pub mesh_time: Option<i64>,
    pub lattice: bool,
    pub check: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            subcommand: String::new(),
            epsilon: 0.1,
            x_lo: -10,
            x_hi: 10,
            t_lo: 0,
            t_hi: 10,
            seed: 1,
            reps: 100,
            dt: 1e-4,
            horizon: 1.0,
            output: None,
            format: None,
            time: 1.0,
            width: 40.0,
            s: 0.0,
            u: 1.0,
            a: 0.0,
            b: 1.0,
            h: None,
            local_time: 100.0,
            cap: 1.0,
            x0: 0.0,
            clock: None,
            windows: None,
            times: None,
            cases: 500,
            epsilons: None,
            mesh_time: None,
            lattice: false,
            check: false,
        }
    }
}

macro_rules! override_from {
    ($cfg:ident, $flags:ident, $($field:ident),*) => {
        $(if let Some(v) = $flags.$field.clone() { $cfg.$field = v; })*
    };
}

impl RunConfig {
    /// Defaults, then the `--config` file, then flags; list-valued and
    /// format fields left unset get the subcommand's defaults.
    pub fn effective(subcommand: &str, flags: &Flags) -> Result<RunConfig> {
        let mut cfg = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        cfg.subcommand = subcommand.to_string();
        override_from!(
            cfg, flags, epsilon, x_lo, x_hi, t_lo, t_hi, seed, reps, dt, horizon, time, width, s, u, a, b, local_time,
            cap, x0, cases
        );
        if flags.output.is_some() {
            cfg.output = flags.output.clone();
        }
        if flags.format.is_some() {
            cfg.format = flags.format;
        }
        for (dst, src) in [
            (&mut cfg.h, &flags.h),
            (&mut cfg.windows, &flags.windows),
            (&mut cfg.times, &flags.times),
            (&mut cfg.epsilons, &flags.epsilons),
        ] {
            if src.is_some() {
                *dst = src.clone();
            }
        }
        if flags.clock.is_some() {
            cfg.clock = flags.clock;
        }
        if flags.mesh_time.is_some() {
            cfg.mesh_time = flags.mesh_time;
        }
        cfg.lattice |= flags.lattice;
        cfg.check |= flags.check;

        let (h, eps, format): (&[f64], &[f64], Format) = match subcommand {
            "sample" => (&[], &[], Format::Csv),
            "census" => (&[], &[], Format::Csv),
            "excursions" => (&[0.01, 0.1, 1.0], &[], Format::Json),
            "cross-thinning" => (&[0.04, 0.16, 0.64], &[], Format::Json),
            "meeting" => (&[], &[0.4, 0.2, 0.1, 0.05], Format::Json),
            "invariants" => (&[], &[0.0, 0.1, 0.5, 1.0], Format::Json),
            _ => (&[], &[], Format::Json),
        };
        cfg.h.get_or_insert_with(|| h.to_vec());
        cfg.epsilons.get_or_insert_with(|| eps.to_vec());
        cfg.format.get_or_insert(format);
        if subcommand == "sticky" {
            cfg.windows.get_or_insert_with(|| vec![1e-3, 1e-2, 1e-1]);
            cfg.times.get_or_insert_with(|| vec![0.1, 0.2, 0.4, 0.8]);
        }
        Ok(cfg)
    }

    fn lattice(&self) -> LatticeConfig {
        LatticeConfig::new(self.epsilon, self.x_lo, self.x_hi, self.t_lo, self.t_hi, self.seed)
    }

    fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }

    fn hs(&self) -> &[f64] {
        self.h.as_deref().unwrap_or(&[])
    }
}

/// Text to write plus, for `--check`, whether the threshold was met.
pub struct Outcome {
    pub text: String,
    pub check: Option<(bool, String)>,
}

fn report_json(cfg: &RunConfig, main: &EstimateReport, extra: Value) -> Value {
    let mut v = json!({
        "config_echo": cfg,
        "estimate": main.estimate,
        "stderr": main.stderr,
        "reference": main.reference,
        "ratio": main.ratio,
        "n": main.n,
        "tainted": main.tainted,
        "seed": cfg.seed,
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn rows_csv(header: &str, rows: &[(f64, &EstimateReport)]) -> String {
    let mut s = format!("{header},estimate,stderr,n,reference\n");
    for (k, r) in rows {
        let reference = r.reference.map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{k},{},{},{},{reference}", r.estimate, r.stderr, r.n);
    }
    s
}

fn first_or_empty(reports: &[EstimateReport]) -> EstimateReport {
    reports.first().cloned().unwrap_or_else(|| EstimateReport::new(0.0, 0.0, 0))
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.reps == 0 {
        return Err(Error::InvalidConfig("reps must be positive".into()));
    }
    let fmt = cfg.format();
    match cfg.subcommand.as_str() {
        "sample" => {
            let field = sample_arrow_field(&cfg.lattice())?;
            let text = match fmt {
                Format::Csv => field.dump(),
                Format::Json => pretty(&json!({ "config_echo": cfg, "seed": cfg.seed, "dump": field.dump() })),
            };
            Ok(Outcome { text, check: None })
        }
        "census" => {
            let field = sample_arrow_field(&cfg.lattice())?;
            let rows = classify::census(&field)?;
            let text = match fmt {
                Format::Csv => classify::census_csv(&rows),
                Format::Json => {
                    pretty(&json!({ "config_echo": cfg, "seed": cfg.seed, "n": rows.len(), "sites": rows }))
                }
            };
            let agree = rows.iter().all(|r| r.crossing == (r.kind == classify::SiteKind::Separation));
            Ok(Outcome { text, check: Some((agree, "crossing and separation sites coincide".into())) })
        }
        "density-psi" if cfg.epsilon == 0.0 || cfg.lattice => {
            let lc = cfg.lattice();
            let exact = oracle::exact_mean_occupancy(&lc)?;
            let est = classify::occupancy_estimate(&lc, cfg.reps)?.with_reference(exact);
            let ok = (est.estimate - exact).abs() <= 4.0 * est.stderr + 1e-9;
            let text = match fmt {
                Format::Csv => rows_csv("epsilon", &[(cfg.epsilon, &est)]),
                Format::Json => pretty(&report_json(cfg, &est, json!({ "mode": "lattice" }))),
            };
            Ok(Outcome { text, check: Some((ok, format!("occupancy {} vs exact {exact}", est.estimate))) })
        }
        "density-psi" => {
            let est = classify::xi_density_estimate(&XiDensityConfig {
                epsilon: cfg.epsilon,
                time: cfg.time,
                width: cfg.width,
                reps: cfg.reps,
                seed: cfg.seed,
            })?;
            let ok = est.within_relative(0.05);
            let text = match fmt {
                Format::Csv => rows_csv("time", &[(cfg.time, &est)]),
                Format::Json => pretty(&report_json(cfg, &est, json!({ "mode": "rescaled" }))),
            };
            Ok(Outcome { text, check: Some((ok, format!("density ratio {:?} (tolerance 5%)", est.ratio))) })
        }
        "relevant-density" => {
            let est = classify::relevant_density_estimate(&RelevantDensityConfig {
                epsilon: cfg.epsilon,
                s: cfg.s,
                u: cfg.u,
                a: cfg.a,
                b: cfg.b,
                reps: cfg.reps,
                seed: cfg.seed,
            })?;
            let ok = est.within_relative(0.15);
            let text = match fmt {
                Format::Csv => rows_csv("epsilon", &[(cfg.epsilon, &est)]),
                Format::Json => pretty(&report_json(
                    cfg,
                    &est,
                    json!({
                        "epsilon": cfg.epsilon, "s": cfg.s, "u": cfg.u, "a": cfg.a, "b": cfg.b,
                        "reps": cfg.reps, "mean": est.estimate,
                    }),
                )),
            };
            Ok(Outcome { text, check: Some((ok, format!("relevant density ratio {:?} (tolerance 15%)", est.ratio))) })
        }
        "t-mesh" => {
            let field = sample_arrow_field(&cfg.lattice())?;
            let big_t = cfg.mesh_time.unwrap_or(cfg.t_lo);
            let comps = classify::t_mesh_components(&field, big_t)?;
            let coalescence = classify::coalescence_sites(&field, big_t)?;
            let mut bad = Vec::new();
            for c in comps.iter().filter(|c| c.is_closed()) {
                if let Err(e) = classify::check_component_walls(&field, c) {
                    bad.push(e.to_string());
                }
            }
            let summary: Vec<Value> = comps
                .iter()
                .map(|c| {
                    json!({ "bottom_time": c.bottom_time, "top_site": c.top_site, "open": c.open,
                            "tainted": c.tainted, "cells": c.cells.len() })
                })
                .collect();
            let text = match fmt {
                Format::Csv => {
                    let mut s = String::from("bottom_time,top_x,top_t,open,tainted,cells\n");
                    for c in &comps {
                        let (tx, tt) = c.top_site.map(|(x, t)| (x.to_string(), t.to_string())).unwrap_or_default();
                        let _ = writeln!(s, "{},{tx},{tt},{},{},{}", c.bottom_time, c.open, c.tainted, c.cells.len());
                    }
                    s
                }
                Format::Json => pretty(&json!({
                    "config_echo": cfg, "seed": cfg.seed, "n": comps.len(), "mesh_time": big_t,
                    "components": summary, "coalescence_sites": coalescence, "wall_errors": bad,
                })),
            };
            Ok(Outcome {
                text,
                check: Some((bad.is_empty(), format!("{} closed components with bad walls", bad.len()))),
            })
        }
        "excursions" => {
            let tail = excursion::excursion_tail_counts(&TailConfig {
                hs: cfg.hs().to_vec(),
                dt: cfg.dt,
                local_time: cfg.local_time,
                cap: cfg.cap,
                chunks: 64,
                seed: cfg.seed,
            })?;
            let reports: Vec<EstimateReport> = tail.rows.iter().map(|r| r.1.clone()).collect();
            let ok = reports.iter().all(|r| r.within_relative(0.05));
            let text = match fmt {
                Format::Csv => excursion::histogram_csv(&excursion::histogram_from_tail(&tail)),
                Format::Json => {
                    let rows: Vec<Value> = tail.rows.iter().map(|(h, r)| json!({ "h": h, "report": r })).collect();
                    pretty(&report_json(
                        cfg,
                        &first_or_empty(&reports),
                        json!({ "local_time": tail.local_time, "steps": tail.steps, "rows": rows }),
                    ))
                }
            };
            Ok(Outcome { text, check: Some((ok, "every tail count within 5% of √(2/(πh))".into())) })
        }
        "cross-thinning" => {
            let mut reports = Vec::new();
            for &h in cfg.hs() {
                reports.push(excursion::crossing_thinning_estimate(h, cfg.reps, cfg.seed, cfg.clock)?);
            }
            let closed: Vec<f64> = reports.iter().map(|r| r.closed_form.estimate).collect();
            let ok = match (closed.first(), closed.last()) {
                (Some(&a), Some(&b)) if a > 0.0 && b > 0.0 => a.max(b) / a.min(b) <= 1.3,
                _ => false,
            };
            let text = match fmt {
                Format::Csv => {
                    let mut s = String::from("h,indicator,indicator_stderr,closed_form,closed_form_stderr,n\n");
                    for r in &reports {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{},{}",
                            r.h,
                            r.indicator.estimate,
                            r.indicator.stderr,
                            r.closed_form.estimate,
                            r.closed_form.stderr,
                            r.indicator.n
                        );
                    }
                    s
                }
                Format::Json => {
                    let main = reports
                        .first()
                        .map(|r| r.indicator.clone())
                        .unwrap_or_else(|| EstimateReport::new(0.0, 0.0, 0));
                    pretty(&report_json(cfg, &main, json!({ "rows": reports })))
                }
            };
            Ok(Outcome { text, check: Some((ok, format!("ρ(h)/√h extreme buckets {closed:?} (tolerance 30%)"))) })
        }
        "sticky" => match fmt {
            Format::Csv => {
                let sc = StickyGapConfig { x0: cfg.x0, ..StickyGapConfig::new(cfg.horizon, cfg.dt) };
                let tr = sde::simulate_sticky_gap(&sc, &mut rng::replicate_rng(cfg.seed, 0))?;
                Ok(Outcome { text: tr.to_csv(), check: None })
            }
            Format::Json => {
                let windows = cfg.windows.clone().unwrap_or_default();
                let times = cfg.times.clone().unwrap_or_default();
                let occ = sde::sticky_zero_occupation(&windows, cfg.dt, cfg.reps, cfg.seed)?;
                let prob = sde::sticky_zero_probability(&times, cfg.x0, cfg.dt, cfg.reps, cfg.seed)?;
                let sticky_ok =
                    occ.first().zip(occ.last()).is_some_and(|(a, b)| a.estimate > 0.9 && a.estimate > b.estimate);
                let mono_ok = prob
                    .windows(2)
                    .all(|w| w[1].estimate - w[0].estimate <= 3.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt());
                let occ_rows: Vec<Value> =
                    windows.iter().zip(&occ).map(|(t, r)| json!({ "window": t, "report": r })).collect();
                let prob_rows: Vec<Value> =
                    times.iter().zip(&prob).map(|(t, r)| json!({ "time": t, "report": r })).collect();
                let text = pretty(&report_json(
                    cfg,
                    &first_or_empty(&occ),
                    json!({ "occupation": occ_rows, "zero_probability": prob_rows }),
                ));
                Ok(Outcome {
                    text,
                    check: Some((sticky_ok && mono_ok, format!("stickiness {sticky_ok}, monotonicity {mono_ok}"))),
                })
            }
        },
        "meeting" => {
            let eps = cfg.epsilons.clone().unwrap_or_default();
            let mut rows = Vec::new();
            for &e in &eps {
                let (r, censored) = sde::meeting_absorption_estimate(&TripleConfig::scaled(e), cfg.reps, cfg.seed)?;
                rows.push((e, r, censored));
            }
            let increasing = rows.windows(2).all(|w| w[1].1.estimate > w[0].1.estimate);
            let last_ok = rows.last().is_some_and(|r| r.1.estimate > 0.8);
            let text = match fmt {
                Format::Csv => {
                    let mut s = String::from("epsilon,estimate,stderr,n,censored\n");
                    for (e, r, c) in &rows {
                        let _ = writeln!(s, "{e},{},{},{},{c}", r.estimate, r.stderr, r.n);
                    }
                    s
                }
                Format::Json => {
                    let reports: Vec<EstimateReport> = rows.iter().map(|r| r.1.clone()).collect();
                    let rows_v: Vec<Value> =
                        rows.iter().map(|(e, r, c)| json!({ "epsilon": e, "report": r, "censored": c })).collect();
                    pretty(&report_json(cfg, &first_or_empty(&reports), json!({ "rows": rows_v })))
                }
            };
            Ok(Outcome {
                text,
                check: Some((increasing && last_ok, format!("increasing {increasing}, last above 0.8 {last_ok}"))),
            })
        }
        "reflect-cross" => {
            let rc = ReflectCrossConfig { x0: cfg.x0, t_end: cfg.horizon, dt: cfg.dt, clock: cfg.clock };
            let horizon = cfg.horizon;
            let dt = cfg.dt;
            match fmt {
                Format::Csv => {
                    let mut r = rng::replicate_rng(cfg.seed, 0);
                    let barrier = Barrier::brownian(0.0, 0.0, horizon, dt, &mut r);
                    let tr = sde::simulate_reflect_cross(&barrier, &rc, &mut r)?;
                    Ok(Outcome { text: tr.to_csv(), check: None })
                }
                Format::Json => {
                    let (ind, closed) = sde::crossing_probability(
                        |r| Barrier::brownian(0.0, 0.0, horizon, dt, r),
                        &rc,
                        cfg.reps,
                        cfg.seed,
                    )?;
                    let ok = (ind.estimate - closed.estimate).abs()
                        <= 4.0 * (ind.stderr.powi(2) + closed.stderr.powi(2)).sqrt();
                    let text = pretty(&report_json(cfg, &ind, json!({ "closed_form": closed })));
                    Ok(Outcome {
                        text,
                        check: Some((ok, "indicator and closed form agree within 4 standard errors".into())),
                    })
                }
            }
        }
        "invariants" => {
            let eps = cfg.epsilons.clone().unwrap_or_default();
            let report = invariants::run_suite(cfg.cases, &eps, cfg.seed)?;
            let failures = report.failures.len();
            let main = EstimateReport::new(failures as f64, 0.0, cfg.cases as u64).with_reference(0.0);
            let text = match fmt {
                Format::Csv => {
                    let mut s = String::from("check,detail,shrunk_window\n");
                    for f in &report.failures {
                        let w = &f.shrunk;
                        let _ = writeln!(
                            s,
                            "{},\"{}\",{}..{}x{}..{}",
                            f.check,
                            f.detail.replace('"', "'"),
                            w.x_lo,
                            w.x_hi,
                            w.t_lo,
                            w.t_hi
                        );
                    }
                    s
                }
                Format::Json => {
                    pretty(&report_json(cfg, &main, json!({ "checks": report.checks, "failures": report.failures })))
                }
            };
            Ok(Outcome { text, check: Some((report.passed(), format!("{failures} invariant failures"))) })
        }
        other => Err(Error::InvalidConfig(format!("unknown subcommand {other}"))),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity { .. } => 3,
        Error::InvalidConfig(_) | Error::Parity { .. } | Error::Precondition(_) | Error::Parse(_) => 2,
        _ => 1,
    }
}

/// Parse `args`, run, write the artifact; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Ok(v) = std::env::var("BNET_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: BNET_THREADS must be a positive integer, got {v:?}");
                return 2;
            }
        }
    }
    let (name, flags) = cli.command.parts();
    let result = RunConfig::effective(name, flags).and_then(|cfg| run(&cfg).map(|o| (cfg, o)));
    let (cfg, outcome) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cfg.output {
        Some(path) => std::fs::write(path, &outcome.text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(outcome.text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 1;
    }
    if cfg.check {
        if let Some((ok, msg)) = outcome.check {
            eprintln!("{}: {msg}", if ok { "PASS" } else { "FAIL" });
            if !ok {
                return 1;
            }
        }
    }
    0
}
