use bnet::oracle::{all_step_paths, enumerate_paths, reflected_max_by_enumeration};
use bnet::paths::{
    dual_leftmost, dual_rightmost, first_meeting_time, hausdorff_distance, hop_concatenate, is_dual_net_path,
    is_net_path, leftmost_path, path_distance, reflected_rightmost, rescale, rescale_point, rightmost_path,
    ContinuumPath,
};
use bnet::{sample_arrow_field, Arrow, ArrowField, DualLatticePath, Error, LatticeConfig, LatticePath};

/// x ∈ [-3,3], t ∈ [0,3]: every site LeftOnly except a branching site at (0,0).
fn single_branch_fixture() -> ArrowField {
    let c = LatticeConfig::new(0.0, -3, 3, 0, 3, 0).with_margin(3);
    ArrowField::from_fn(&c, |x, t| if (x, t) == (0, 0) { Arrow::Both } else { Arrow::LeftOnly }).unwrap()
}

/// Everything drifts towards x = 0; x = 0 itself steps left.
fn funnel_fixture() -> ArrowField {
    let c = LatticeConfig::new(0.0, -6, 6, 0, 6, 0);
    ArrowField::from_fn(&c, |x, _| if x < 0 { Arrow::RightOnly } else { Arrow::LeftOnly }).unwrap()
}

fn random_field(eps: f64, seed: u64) -> ArrowField {
    sample_arrow_field(&LatticeConfig::new(eps, -10, 10, 0, 10, seed).with_margin(11)).unwrap()
}

#[test]
fn extremal_paths_coincide_without_branching() {
    for seed in 0..10 {
        let f = random_field(0.0, seed);
        for x in f.row_sites(0).step_by(3) {
            assert_eq!(leftmost_path(&f, (x, 0)).unwrap(), rightmost_path(&f, (x, 0)).unwrap());
        }
        for x in f.dual_row_sites(11).step_by(3) {
            assert_eq!(dual_leftmost(&f, (x, 11)).unwrap(), dual_rightmost(&f, (x, 11)).unwrap());
        }
    }
}

#[test]
fn hand_fixture_extremal_paths() {
    let f = single_branch_fixture();
    assert_eq!(leftmost_path(&f, (0, 0)).unwrap().positions, vec![0, -1, -2, -3]);
    assert_eq!(rightmost_path(&f, (0, 0)).unwrap().positions, vec![0, 1, 0, -1]);
    // Dual arrows are the mirror images: every dual site steps right except
    // the branching one at (0,1). The dual left-most path turns right there.
    assert_eq!(dual_leftmost(&f, (-3, 4)).unwrap().positions, vec![-3, -2, -1, 0, 1]);
    assert_eq!(dual_rightmost(&f, (-3, 4)).unwrap().positions, vec![-3, -2, -1, 0, -1]);
}

#[test]
fn leftmost_never_right_of_rightmost() {
    for seed in 0..1000u64 {
        let f = sample_arrow_field(&LatticeConfig::new(0.3, -8, 8, 0, 8, seed).with_margin(9)).unwrap();
        let x = 2 * (seed as i64 % 7) - 6;
        let (l, r) = (leftmost_path(&f, (x, 0)).unwrap(), rightmost_path(&f, (x, 0)).unwrap());
        for (a, b) in l.positions.iter().zip(&r.positions) {
            assert!(a <= b);
        }
        let (dl, dr) = (dual_leftmost(&f, (x, 9)).unwrap(), dual_rightmost(&f, (x, 9)).unwrap());
        for (a, b) in dl.positions.iter().zip(&dr.positions) {
            assert!(a >= b, "dual left-most takes right arrows");
        }
    }
}

#[test]
fn net_path_acceptance() {
    let f = single_branch_fixture();
    assert!(is_net_path(&f, &leftmost_path(&f, (0, 0)).unwrap()));
    assert!(is_dual_net_path(&f, &dual_leftmost(&f, (-3, 4)).unwrap()));
    // (1,1) is LeftOnly.
    assert!(!is_net_path(&f, &LatticePath::new(0, vec![0, 1, 2]).unwrap()));
    assert!(is_net_path(&f, &LatticePath::new(0, vec![0, 1, 0]).unwrap()));
}

#[test]
fn net_paths_equal_enumeration_on_small_windows() {
    for seed in 0..20 {
        let f = sample_arrow_field(&LatticeConfig::new(0.4, -3, 3, 0, 6, seed)).unwrap();
        for x in f.row_sites(0) {
            let arrow_paths = enumerate_paths(&f, (x, 0));
            for p in all_step_paths(&f, (x, 0)) {
                let listed = arrow_paths.iter().any(|q| q.positions == p.positions && !q.tainted);
                assert_eq!(is_net_path(&f, &p), listed, "{:?}", p.positions);
            }
        }
    }
}

#[test]
fn hopping() {
    let f = single_branch_fixture();
    let l = leftmost_path(&f, (0, 0)).unwrap();
    assert_eq!(hop_concatenate(&l, &l, 2).unwrap(), l);
    let r = rightmost_path(&f, (0, 0)).unwrap();
    // r passes (1,1) then follows left arrows; hop from a path through (2,0) onto it.
    let p = LatticePath::new(0, vec![2, 1, 0, -1]).unwrap();
    let h = hop_concatenate(&p, &r, 1).unwrap();
    assert!(is_net_path(&f, &h));
    assert!(matches!(hop_concatenate(&l, &r, 0), Err(Error::Precondition(_))));

    for seed in 0..50 {
        let f = random_field(0.5, seed);
        for x in f.row_sites(0).filter(|x| x.abs() < 8) {
            if f.get(x, 0) != Some(Arrow::Both) {
                continue;
            }
            let (l, r) = (leftmost_path(&f, (x, 0)).unwrap(), rightmost_path(&f, (x, 0)).unwrap());
            if let Some(t) = first_meeting_time(&l, &r).unwrap() {
                assert!(is_net_path(&f, &hop_concatenate(&l, &r, t).unwrap()));
                assert!(is_net_path(&f, &hop_concatenate(&r, &l, t).unwrap()));
            }
        }
    }
}

#[test]
fn meeting_times() {
    let p = LatticePath::new(2, vec![0, 1, 2]).unwrap();
    assert_eq!(first_meeting_time(&p, &p).unwrap(), Some(3));
    let odd = LatticePath { start_time: 2, positions: vec![1, 2, 3], tainted: false };
    assert!(matches!(first_meeting_time(&p, &odd), Err(Error::Parity { .. })));

    let f = funnel_fixture();
    let a = leftmost_path(&f, (-2, 0)).unwrap();
    let b = leftmost_path(&f, (2, 0)).unwrap();
    assert_eq!(&a.positions[..4], &[-2, -1, 0, -1]);
    assert_eq!(&b.positions[..4], &[2, 1, 0, -1]);
    assert_eq!(first_meeting_time(&a, &b).unwrap(), Some(2));
    let c = leftmost_path(&f, (-6, 0)).unwrap();
    // c climbs one step per row; b alternates between 0 and -1.
    assert_eq!(first_meeting_time(&b, &c).unwrap(), Some(5));
}

#[test]
fn leftmost_paths_coalesce() {
    for seed in 0..200 {
        let f = random_field(0.3, seed);
        let paths: Vec<LatticePath> = f.row_sites(0).map(|x| leftmost_path(&f, (x, 0)).unwrap()).collect();
        for w in paths.windows(2) {
            if let Some(t) = first_meeting_time(&w[0], &w[1]).unwrap() {
                for s in t..=f.t_hi() {
                    assert_eq!(w[0].at(s), w[1].at(s));
                }
            }
        }
    }
}

#[test]
fn net_paths_lie_between_extremal_paths() {
    for seed in 0..100 {
        let f = sample_arrow_field(&LatticeConfig::new(0.5, -6, 6, 0, 6, seed).with_margin(7)).unwrap();
        for x in [-2, 0, 2] {
            let (l, r) = (leftmost_path(&f, (x, 0)).unwrap(), rightmost_path(&f, (x, 0)).unwrap());
            for p in enumerate_paths(&f, (x, 0)) {
                for (t, y) in p.points() {
                    assert!(l.at(t).unwrap() <= y && y <= r.at(t).unwrap());
                }
            }
        }
    }
}

#[test]
fn reflection_inactive_far_from_the_path() {
    for seed in 0..50 {
        let f = random_field(0.4, seed);
        let far = DualLatticePath::new(11, (0..12).map(|k| 1000 + (k % 2)).collect()).unwrap();
        let refl = reflected_rightmost(&f, (0, 0), &far).unwrap();
        assert_eq!(refl.path.positions, rightmost_path(&f, (0, 0)).unwrap().positions);
        assert!(refl.reflection_times.is_empty());
    }
}

#[test]
fn reflected_path_is_the_admissible_maximum() {
    let mut checked = 0;
    for seed in 0..300 {
        let f = sample_arrow_field(&LatticeConfig::new(0.4, -4, 4, 0, 8, seed).with_margin(9)).unwrap();
        for xd in [2, 4, 6] {
            let dual = dual_leftmost(&f, (xd, 9)).unwrap();
            if dual.end_time() > 0 {
                continue;
            }
            let Some(max) = reflected_max_by_enumeration(&f, (0, 0), &dual) else { continue };
            let refl = reflected_rightmost(&f, (0, 0), &dual).unwrap();
            assert_eq!(refl.path.positions, max, "seed {seed}, dual from {xd}");
            checked += 1;
        }
    }
    assert!(checked > 200);
}

#[test]
fn reflected_path_follows_rightmost_between_reflections() {
    let mut with_reflections = 0;
    for seed in 0..300 {
        let f = sample_arrow_field(&LatticeConfig::new(0.5, -6, 6, 0, 10, seed).with_margin(11)).unwrap();
        let dual = dual_leftmost(&f, (2, 11)).unwrap();
        let Ok(refl) = reflected_rightmost(&f, (0, 0), &dual) else { continue };
        let p = &refl.path;
        let mut starts = vec![p.start_time];
        starts.extend(refl.reflection_times.iter().map(|&s| s + 1));
        let mut ends: Vec<i64> = refl.reflection_times.clone();
        ends.push(p.end_time());
        if !refl.reflection_times.is_empty() {
            with_reflections += 1;
        }
        for (&a, &b) in starts.iter().zip(&ends) {
            let r = rightmost_path(&f, (p.at(a).unwrap(), a)).unwrap();
            for s in a..=b {
                assert_eq!(r.at(s), p.at(s), "seed {seed}: segment {a}..{b}");
            }
        }
    }
    assert!(with_reflections > 20);
}

#[test]
fn rescaling() {
    let p = LatticePath::new(0, vec![0, 1, 2, 1]).unwrap();
    for (q, (t, x)) in rescale(&p, 1.0).iter().zip(p.points()) {
        assert_eq!((q.x, q.t), (x as f64, t as f64));
    }
    let q = rescale_point(10.0, 100.0, 0.1);
    assert!((q.x - 1.0).abs() < 1e-12 && (q.t - 1.0).abs() < 1e-12);
    let (e, d) = (0.3, 0.7);
    let once = rescale_point(5.0, 8.0, e * d);
    let twice = rescale_point(rescale_point(5.0, 8.0, d).x, rescale_point(5.0, 8.0, d).t, e);
    assert!((once.x - twice.x).abs() < 1e-12 && (once.t - twice.t).abs() < 1e-12);
}

fn constant(x: f64) -> ContinuumPath {
    ContinuumPath { knots: vec![(0.0, x), (1.0, x)] }
}

#[test]
fn path_metric() {
    let p = rightmost_path(&random_field(0.3, 1), (0, 0)).unwrap().rescaled(0.3);
    assert_eq!(path_distance(&p, &p), 0.0);
    let d = path_distance(&constant(0.0), &constant(1.0));
    assert!((d - 1f64.tanh()).abs() < 1e-12);
    assert!((d - 0.761_594_155_955_764_9).abs() < 1e-12);
    for seed in 0..20 {
        let f = random_field(0.5, seed);
        let a = leftmost_path(&f, (-4, 0)).unwrap().rescaled(0.5);
        let b = rightmost_path(&f, (6, 2)).unwrap().rescaled(0.5);
        let d = path_distance(&a, &b);
        assert!((0.0..=2.0).contains(&d));
        assert_eq!(d, path_distance(&b, &a));
    }
}

#[test]
fn hausdorff_metric() {
    let k = vec![constant(0.0), constant(1.0)];
    assert_eq!(hausdorff_distance(&k, &k), 0.0);
    let (p, q) = (constant(0.0), constant(2.0));
    assert_eq!(hausdorff_distance(std::slice::from_ref(&p), std::slice::from_ref(&q)), path_distance(&p, &q));
    // {0, 1} against {0, 3}: 1 is closest to 3 and vice versa.
    let d = hausdorff_distance(&k, &[constant(0.0), constant(3.0)]);
    assert!((d - (3f64.tanh() - 1f64.tanh())).abs() < 1e-12);
}
