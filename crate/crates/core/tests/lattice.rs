use bnet::lattice::{contact_kernel_sample, dual_arrows, transition_kernel_check};
use bnet::{sample_arrow_field, Arrow, ArrowField, Error, LatticeConfig};

fn all_sites(f: &ArrowField) -> Vec<(i64, i64)> {
    let c = f.config().clone();
    (c.t_lo..=c.t_hi).flat_map(|t| f.row_sites(t).map(move |x| (x, t))).collect()
}

#[test]
fn epsilon_one_is_all_branching() {
    let f = sample_arrow_field(&LatticeConfig::new(1.0, -20, 20, 0, 20, 3)).unwrap();
    for (x, t) in all_sites(&f) {
        assert_eq!(f.get(x, t), Some(Arrow::Both));
        assert_eq!(f.get_dual(x, t + 1), Some(Arrow::Both));
    }
}

#[test]
fn branching_frequency_matches_epsilon() {
    for eps in [0.01, 0.3] {
        let f = sample_arrow_field(&LatticeConfig::new(eps, -1000, 1000, 0, 999, 17)).unwrap();
        let sites = all_sites(&f);
        let n = sites.len() as f64;
        assert!(n >= 1e6);
        let both = sites.iter().filter(|&&(x, t)| f.get(x, t).unwrap().is_both()).count() as f64;
        let se = (eps * (1.0 - eps) / n).sqrt();
        assert!((both / n - eps).abs() <= 3.0 * se, "eps {eps}: {} vs {eps}", both / n);
        let left_only = sites.iter().filter(|&&(x, t)| f.get(x, t) == Some(Arrow::LeftOnly)).count() as f64;
        let p = (1.0 - eps) / 2.0;
        assert!((left_only / n - p).abs() <= 4.0 * (p * (1.0 - p) / n).sqrt());
    }
}

#[test]
fn fixed_seed_gives_identical_fields() {
    let c = LatticeConfig::new(0.2, -30, 30, -5, 25, 99);
    assert_eq!(sample_arrow_field(&c).unwrap().dump(), sample_arrow_field(&c).unwrap().dump());
    let other = LatticeConfig { seed: 100, ..c.clone() };
    assert_ne!(sample_arrow_field(&c).unwrap().dump(), sample_arrow_field(&other).unwrap().dump());
}

#[test]
fn sub_window_agrees_with_larger_window() {
    let big = sample_arrow_field(&LatticeConfig::new(0.4, -40, 40, 0, 30, 5)).unwrap();
    let small = sample_arrow_field(&LatticeConfig::new(0.4, -10, 10, 5, 15, 5)).unwrap();
    for (x, t) in all_sites(&small) {
        assert_eq!(small.get(x, t), big.get(x, t));
    }
}

#[test]
fn dual_mirror_rule() {
    let c = LatticeConfig::new(0.0, -2, 2, 0, 2, 0);
    let pick = |a: Arrow| ArrowField::from_fn(&c, move |_, _| a).unwrap();
    let f = pick(Arrow::RightOnly);
    assert_eq!(f.get_dual(0, 1), Some(Arrow::LeftOnly));
    let f = pick(Arrow::LeftOnly);
    assert_eq!(f.get_dual(0, 1), Some(Arrow::RightOnly));
    let f = pick(Arrow::Both);
    assert_eq!(f.get_dual(0, 1), Some(Arrow::Both));
    for a in [Arrow::LeftOnly, Arrow::RightOnly, Arrow::Both] {
        assert_eq!(a.mirror().mirror(), a);
    }
    let g = sample_arrow_field(&LatticeConfig::new(0.5, -10, 10, 0, 10, 8)).unwrap();
    let view = dual_arrows(&g);
    for (x, t) in all_sites(&g) {
        assert_eq!(view.get(x, t + 1), Some(g.get(x, t).unwrap().mirror()));
    }
}

/// Do the closed segments p0-p1 and q0-q1 share a point?
fn segments_meet(p0: (f64, f64), p1: (f64, f64), q0: (f64, f64), q1: (f64, f64)) -> bool {
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let (d1, d2) = (cross(q0, q1, p0), cross(q0, q1, p1));
    let (d3, d4) = (cross(p0, p1, q0), cross(p0, p1, q1));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

#[test]
fn forward_and_dual_segments_meet_only_at_branching_sites() {
    for seed in 0..20 {
        let f = sample_arrow_field(&LatticeConfig::new(0.3, -12, 12, 0, 12, seed)).unwrap();
        for (x, t) in all_sites(&f) {
            if t == f.t_hi() {
                continue;
            }
            let a = f.get(x, t).unwrap();
            let d = f.get_dual(x, t + 1).unwrap();
            let fwd: Vec<i64> = [(a.has_left(), -1), (a.has_right(), 1)].iter().filter(|p| p.0).map(|p| p.1).collect();
            let dual: Vec<i64> = [(d.has_left(), -1), (d.has_right(), 1)].iter().filter(|p| p.0).map(|p| p.1).collect();
            let (xf, tf) = (x as f64, t as f64);
            let meet = fwd.iter().any(|&dx| {
                dual.iter().any(|&dy| {
                    segments_meet((xf, tf), (xf + dx as f64, tf + 1.0), (xf, tf + 1.0), (xf + dy as f64, tf))
                })
            });
            assert_eq!(meet, a.is_both(), "site ({x},{t}) arrow {a:?}");
        }
    }
}

#[test]
fn crossing_kernel_values() {
    assert_eq!(transition_kernel_check(0.0).left_contact_right, 0.0);
    assert!((transition_kernel_check(1.0).left_contact_right - 1.0).abs() < 1e-15);
    assert!((transition_kernel_check(0.2).left_contact_right - 1.0 / 3.0).abs() < 1e-15);
    for eps in [0.01, 0.2, 0.5, 1.0] {
        let k = transition_kernel_check(eps);
        assert!((k.left_contact_right - 2.0 * eps / (1.0 + eps)).abs() < 1e-14);
        assert!((k.off_contact_right - (1.0 + eps) / 2.0).abs() < 1e-14);
    }
}

#[test]
fn sampled_contact_frequency_matches_kernel() {
    let s = contact_kernel_sample(0.2, 100_000, 4).unwrap();
    assert!(s.events >= 100_000);
    assert!((s.frequency() - s.exact).abs() <= 4.0 * s.stderr());
}

#[test]
fn dump_round_trips_and_rejects_garbage() {
    let f = sample_arrow_field(&LatticeConfig::new(0.25, -6, 6, 1, 7, 12).with_margin(3)).unwrap();
    let g = ArrowField::parse_dump(&f.dump()).unwrap();
    for (x, t) in all_sites(&f) {
        assert_eq!(f.get(x, t), g.get(x, t));
    }
    assert!(matches!(ArrowField::parse_dump(""), Err(Error::Parse(_))));
    assert!(matches!(ArrowField::parse_dump("epsilon=0.1 window=0,2,0,1 seed=1\nLX\nL\n"), Err(Error::Parse(_))));
}

#[test]
fn invalid_windows_are_rejected() {
    assert!(matches!(sample_arrow_field(&LatticeConfig::new(1.5, 0, 4, 0, 4, 1)), Err(Error::InvalidConfig(_))));
    assert!(matches!(sample_arrow_field(&LatticeConfig::new(0.5, 0, 3, 0, 4, 1)), Err(Error::InvalidConfig(_))));
    assert!(matches!(sample_arrow_field(&LatticeConfig::new(0.5, 0, 4, 4, 4, 1)), Err(Error::InvalidConfig(_))));
    let huge = LatticeConfig::new(0.5, -2_000_000_000, 2_000_000_000, 0, 2_000_000_000, 1);
    assert!(matches!(sample_arrow_field(&huge), Err(Error::Capacity { .. })));
    let wide = LatticeConfig::new(0.5, i64::MIN + 2, i64::MAX - 1, 0, 4, 1);
    assert!(matches!(sample_arrow_field(&wide), Err(Error::InvalidConfig(_))));
    let tall = LatticeConfig::new(0.5, 0, 4, 0, 4, 1).with_margin(i64::MAX);
    assert!(matches!(sample_arrow_field(&tall), Err(Error::InvalidConfig(_))));
}
