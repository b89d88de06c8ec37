use std::f64::consts::PI;

use lls_core::deterministic::{parse_zeros_str, riemann_unfold, OffsetSpec, BUNDLED_ZEROS};
use lls_core::ensembles::{sample_poisson_line, EnsembleConfig, EnsembleSampler};
use lls_core::statistics::{
    covariance_from_means, protocol1, protocol2_points, ratios, spaced_reference_points, SpacingStats, Workers,
};
use proptest::prelude::*;

#[test]
fn results_independent_of_worker_count() {
    let sampler = EnsembleSampler::new(EnsembleConfig::new(1, 24, 17)).unwrap();
    let runs: Vec<SpacingStats> = [1, 2, 3]
        .iter()
        .map(|&t| protocol1(&sampler, PI, 4, 3000, &Workers::new(t).unwrap()).unwrap())
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn poisson_line_many_points() {
    let line = sample_poisson_line(1.0, 200_000, 4).unwrap();
    let phis = spaced_reference_points(&line, 20_000, 4, 5).unwrap();
    let stats = protocol2_points(&line, &phis, 4).unwrap();
    assert_eq!(stats.count(), 20_000);
    assert!((stats.mean(0) - 2.0).abs() < 4.0 * stats.stderr(0));
    for r in ratios(&stats).unwrap() {
        assert!((r.value - 0.5).abs() < 4.0 * r.stderr, "{r:?}");
    }
    // uncorrelated gaps: no autocovariance at any lag
    for c in covariance_from_means(&stats, 1.0).into_iter().skip(1) {
        assert!(c.value.abs() < 4.0 * c.stderr, "{c:?}");
    }
}

#[test]
fn unitary_neighbours_anticorrelate() {
    let sampler = EnsembleSampler::new(EnsembleConfig::new(2, 32, 8)).unwrap();
    let stats = protocol1(&sampler, PI, 2, 20_000, &Workers::new(0).unwrap()).unwrap();
    let lag1 = covariance_from_means(&stats, 1.0)[1];
    assert!(lag1.value + 5.0 * lag1.stderr < 0.0, "{lag1:?}");
}

#[test]
fn bundled_zeros_zeroth_spacing() {
    let data = parse_zeros_str(BUNDLED_ZEROS, &OffsetSpec::FromHeader).unwrap();
    assert_eq!(data.len(), 10_000);
    // the first zero lies below 2πe and cannot be unfolded
    let data = data.slice(1..data.len()).unwrap();
    let levels = riemann_unfold(&data).unwrap();
    let phis = spaced_reference_points(&levels, 1000, 4, 1).unwrap();
    let stats = protocol2_points(&levels, &phis, 4).unwrap();
    assert!((stats.mean(0) - 1.180).abs() < 0.05, "<s_0> = {}", stats.mean(0));
}

proptest! {
    #[test]
    fn merge_matches_single_pass(
        rows in prop::collection::vec(prop::collection::vec(0.0f64..5.0, 3), 2..200),
        cut in 0usize..200,
    ) {
        let cut = cut % rows.len();
        let mut whole = SpacingStats::new(2);
        rows.iter().for_each(|r| whole.push(r));
        let (mut a, mut b) = (SpacingStats::new(2), SpacingStats::new(2));
        rows[..cut].iter().for_each(|r| a.push(r));
        rows[cut..].iter().for_each(|r| b.push(r));
        a.merge(&b);
        prop_assert_eq!(a.count(), whole.count());
        for ell in 0..=2 {
            prop_assert!((a.mean(ell) - whole.mean(ell)).abs() < 1e-12);
            prop_assert!((a.variance(ell) - whole.variance(ell)).abs() < 1e-10);
            prop_assert!((a.covariance_with_zeroth(ell) - whole.covariance_with_zeroth(ell)).abs() < 1e-10);
        }
    }

    #[test]
    fn ratios_ignore_units(
        rows in prop::collection::vec(prop::collection::vec(0.1f64..5.0, 4), 2..100),
        factor in 1e-3f64..1e3,
    ) {
        let mut stats = SpacingStats::new(3);
        rows.iter().for_each(|r| stats.push(r));
        let (plain, scaled) = (ratios(&stats).unwrap(), ratios(&stats.scaled(factor)).unwrap());
        for (p, s) in plain.iter().zip(&scaled) {
            prop_assert!((p.value - s.value).abs() < 1e-12 * p.value.abs().max(1.0));
        }
    }
}
