use bnet::excursion::{
    crossing_thinning_estimate, decompose_excursions, excursion_tail_counts, histogram, histogram_from_tail,
    sample_excursion, tail_intensity_estimate, tail_reference, ReflectedWalk, TailConfig,
};
use bnet::rng::replicate_rng;
use bnet::Error;
use rand::Rng;

#[test]
fn hand_walk_has_one_complete_excursion() {
    let dt = 0.25;
    let walk = ReflectedWalk::from_samples(dt, vec![0.0, -1.0, 0.0, 1.0, 0.0, -1.0]).unwrap();
    assert_eq!(walk.psi, vec![0.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
    assert_eq!(walk.x, vec![0.0, 0.0, 1.0, 2.0, 1.0, 0.0]);
    let ex = decompose_excursions(&walk);
    assert_eq!(ex.len(), 1);
    assert_eq!(ex[0].start, dt);
    assert_eq!(ex[0].duration, 4.0 * dt);
    assert_eq!(ex[0].level, 1.0);
    assert!(ex[0].complete);
    assert_eq!(walk.contact_time(), dt);
    assert_eq!(walk.local_time(), 1.0);
}

#[test]
fn monotone_paths() {
    let up = ReflectedWalk::from_samples(0.1, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
    let ex = decompose_excursions(&up);
    assert_eq!(ex.iter().filter(|e| e.complete).count(), 0);
    assert_eq!(ex.iter().filter(|e| !e.complete).count(), 1);
    let down = ReflectedWalk::from_samples(0.1, vec![0.0, -1.0, -2.0, -3.0]).unwrap();
    assert!(decompose_excursions(&down).is_empty());
    assert!((down.contact_time() - down.horizon()).abs() < 1e-12);
}

fn partition_holds(walk: &ReflectedWalk) {
    let ex = decompose_excursions(walk);
    let busy: f64 = ex.iter().map(|e| e.duration).sum();
    assert!((busy + walk.contact_time() - walk.horizon()).abs() < 1e-9 * walk.horizon().max(1.0));
    for w in ex.windows(2) {
        assert!(w[0].start + w[0].duration <= w[1].start + 1e-12);
        assert!(w[0].level <= w[1].level);
    }
    assert!(ex.iter().rev().skip(1).all(|e| e.complete));
}

#[test]
fn excursions_and_contact_partition_time() {
    for seed in 0..10 {
        let mut rng = replicate_rng(seed, 0);
        partition_holds(&ReflectedWalk::simulate(20_000, 1e-4, &mut rng).unwrap());
        // integer walks hit 0 exactly and sit there
        let mut b = vec![0.0];
        for _ in 0..2000 {
            let step = [-1.0, 0.0, 1.0][rng.random_range(0..3)];
            b.push(b.last().unwrap() + step);
        }
        partition_holds(&ReflectedWalk::from_samples(1.0, b).unwrap());
    }
}

#[test]
fn compensator_is_flat_off_contact() {
    let walk = ReflectedWalk::simulate(200_000, 1e-5, &mut replicate_rng(4, 0)).unwrap();
    let tol = 5.0 * (1e-5f64).sqrt();
    for k in 0..walk.b.len() - 1 {
        assert!(walk.x[k] >= 0.0);
        if walk.psi[k + 1] > walk.psi[k] {
            assert!(walk.x[k + 1] < tol, "compensator grew at height {}", walk.x[k + 1]);
        }
    }
    assert!(walk.local_time() > 0.0);
}

#[test]
fn tail_reference_values() {
    assert!((tail_reference(1.0) - 0.797_884_560_802_865_4).abs() < 1e-12);
    assert!((tail_reference(0.01) - 7.978_845_608_028_654).abs() < 1e-9);
    assert!(tail_reference(1e12) < 1e-6);
    assert_eq!(tail_reference(0.0), f64::INFINITY);
}

#[test]
fn brownian_scaling_of_durations() {
    let walk = ReflectedWalk::simulate(50_000, 1e-4, &mut replicate_rng(9, 0)).unwrap();
    let c = 3.0;
    let a = decompose_excursions(&walk);
    let b = decompose_excursions(&walk.rescaled(c));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((y.duration - c * c * x.duration).abs() < 1e-9);
        assert!((y.level - c * x.level).abs() < 1e-9);
    }
    assert!((walk.rescaled(c).local_time() - c * walk.local_time()).abs() < 1e-9);
}

#[test]
fn tail_estimates_from_stored_and_streamed_walks() {
    let walk = ReflectedWalk::simulate(2_000_000, 1e-5, &mut replicate_rng(2, 0)).unwrap();
    let ex = decompose_excursions(&walk);
    let est = tail_intensity_estimate(&ex, walk.local_time(), 0.01).unwrap();
    assert!((est.estimate - tail_reference(0.01)).abs() < 4.0 * est.stderr, "{est:?}");
    assert!(matches!(tail_intensity_estimate(&ex, 0.0, 0.01), Err(Error::InvalidConfig(_))));
    let rows = histogram(&ex, walk.local_time(), 0.001, 3);
    assert_eq!(rows.len(), 3);
    assert!((rows[1].h_lo - 0.004).abs() < 1e-15);

    let cfg = TailConfig { hs: vec![0.01, 0.04, 0.16], dt: 1e-5, local_time: 300.0, cap: 0.16, chunks: 4, seed: 3 };
    let tail = excursion_tail_counts(&cfg).unwrap();
    assert!(tail.local_time >= 300.0);
    for (h, r) in &tail.rows {
        assert!((r.estimate - tail_reference(*h)).abs() < 4.0 * r.stderr, "h = {h}: {r:?}");
    }
    let hist = histogram_from_tail(&tail);
    assert_eq!(hist.len(), 2);
    assert_eq!(hist[0].count, tail.rows[0].1.n - tail.rows[1].1.n);
    let bad = TailConfig { hs: vec![0.5], ..cfg };
    assert!(matches!(excursion_tail_counts(&bad), Err(Error::InvalidConfig(_))));
}

#[test]
fn sampled_excursions_have_the_requested_length() {
    let dt = 1e-4;
    for seed in 0..20 {
        let (f, _) = sample_excursion(0.01, 0.04, dt, &mut replicate_rng(seed, 5));
        let n = f.len() - 1;
        assert!((100..400).contains(&n), "{n}");
        assert_eq!((f[0], f[n]), (0.0, 0.0));
        assert!(f[1..n].iter().all(|&v| v > 0.0));
    }
}

#[test]
fn thinning_indicator_matches_closed_form() {
    let r = crossing_thinning_estimate(0.16, 2000, 7, None).unwrap();
    let se = (r.indicator.stderr.powi(2) + r.closed_form.stderr.powi(2)).sqrt();
    assert!((r.indicator.estimate - r.closed_form.estimate).abs() < 4.0 * se, "{r:?}");
    let never = crossing_thinning_estimate(0.16, 200, 7, Some(f64::INFINITY)).unwrap();
    assert_eq!(never.indicator.estimate, 0.0);
    assert!(crossing_thinning_estimate(0.0, 10, 1, None).is_err());
}

/// The scaling property as stated for the bucket set {0.04, 0.16, 0.64}:
/// the extreme buckets of ρ(h)/√h agree within 30%.
#[test]
fn thinning_rate_scales_like_root_h() {
    let lo = crossing_thinning_estimate(0.04, 2000, 31, None).unwrap();
    let hi = crossing_thinning_estimate(0.64, 2000, 32, None).unwrap();
    let ratio = lo.closed_form.estimate / hi.closed_form.estimate;
    assert!(ratio.max(1.0 / ratio) <= 1.3, "extreme-bucket ratio {ratio:.3}");
}
