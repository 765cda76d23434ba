use bnet::invariants::{check_field, random_case, run_suite, shrink, Check, CHECKS};
use bnet::rng::replicate_rng;
use bnet::{sample_arrow_field, ArrowField, LatticeConfig};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_windows_satisfy_every_check(
        eps in prop_oneof![Just(0.0), Just(1.0), 0.0..1.0f64],
        half_width in 1..=5i64,
        height in 1..=10i64,
        x_lo in -6..=6i64,
        t_lo in -4..=4i64,
        seed in any::<u64>(),
    ) {
        let c = LatticeConfig::new(eps, x_lo, x_lo + 2 * half_width, t_lo, t_lo + height, seed).with_margin(height + 1);
        let field = sample_arrow_field(&c).unwrap();
        let failures = check_field(&field);
        prop_assert!(failures.is_empty(), "{:?}\n{}", failures, field.dump());
    }
}

#[test]
fn suite_passes_on_all_regimes() {
    let report = run_suite(300, &[0.0, 0.5, 1.0], 2).unwrap();
    assert!(report.passed(), "{:?}", report.failures);
    assert_eq!(report.cases, 300);
    assert_eq!(report.checks.len(), CHECKS.len());
    assert!(run_suite(10, &[], 1).is_err());
}

#[test]
fn random_cases_respect_their_bounds() {
    let mut rng = replicate_rng(8, 0);
    for _ in 0..500 {
        let c = random_case(&mut rng, 0.3);
        assert!(c.validate().is_ok());
        assert!(c.x_hi - c.x_lo <= 10 && c.t_hi - c.t_lo <= 10);
        assert_eq!(c.margin, c.t_hi - c.t_lo + 1);
    }
}

fn no_branching(field: &ArrowField) -> Result<(), String> {
    let c = field.config();
    for t in c.t_lo..=c.t_hi {
        for x in field.row_sites(t).filter(|x| (c.x_lo..=c.x_hi).contains(x)) {
            if field.get(x, t).unwrap().is_both() {
                return Err(format!("branching at ({x},{t})"));
            }
        }
    }
    Ok(())
}

#[test]
fn shrinking_keeps_the_failure_and_trims_the_window() {
    let check = Check { name: "no-branching", run: no_branching };
    let c = LatticeConfig::new(0.5, -10, 10, 0, 10, 3).with_margin(11);
    assert!(no_branching(&sample_arrow_field(&c).unwrap()).is_err());
    let s = shrink(&c, &check);
    assert!(no_branching(&sample_arrow_field(&s).unwrap()).is_err());
    assert!((s.x_hi - s.x_lo) * (s.t_hi - s.t_lo) < 20 * 10);
}
