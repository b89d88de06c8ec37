use std::f64::consts::PI;

use lls_core::deterministic::{levels_csv, parse_zeros_file, riemann_unfold, BilliardFamily, OffsetSpec};
use lls_core::statistics::{protocol1, protocol2_param, ratios, Workers};
use lls_core::syk::{syk_spectrum, SykConfig, SykSampler};

#[test]
fn billiard_family_is_poissonian() {
    let family = BilliardFamily {
        area: 4.0 * PI,
        aspect_range: (1.2, 3.0),
        energy_center: 1e5,
        window_halfwidth: 600.0,
        seed: 21,
    };
    let stats = protocol2_param(|q| family.draw(q), 4, 4000, &Workers::new(0).unwrap()).unwrap();
    assert!((stats.mean(0) - 2.0).abs() < 5.0 * stats.stderr(0), "<s_0> = {}", stats.mean(0));
    for ell in 1..=4 {
        assert!((stats.mean(ell) - 1.0).abs() < 5.0 * stats.stderr(ell), "<s_{ell}> = {}", stats.mean(ell));
    }
}

#[test]
fn zeros_file_with_base_unfolds_near_unit_density() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zeros.txt");
    // consecutive zeros near 10¹² have mean spacing 2π/ln(10¹²/2π) ≈ 0.2437
    let body: String = (0..400).map(|i| format!("{}\n", 0.5 + 0.2437 * i as f64)).collect();
    std::fs::write(&path, format!("# base 1000000000000\n# index 1\n{body}")).unwrap();
    let data = parse_zeros_file(&path, &OffsetSpec::FromHeader).unwrap();
    assert_eq!(data.len(), 400);
    let unfolded = riemann_unfold(&data).unwrap();
    let gap = unfolded.mean_gap().unwrap();
    assert!((gap - 1.0).abs() < 1e-3, "{gap}");
    assert_eq!(levels_csv(&unfolded).lines().count(), 400);
}

#[test]
fn syk_classes_by_majorana_count() {
    let beta = |n| SykConfig::new(n, 1.0, 0).symmetry_beta();
    assert_eq!([beta(8), beta(10), beta(12), beta(14), beta(16)], [1, 2, 4, 2, 1]);
    let levels = syk_spectrum(&SykConfig::new(10, 1.0, 3)).unwrap();
    assert_eq!(levels.len(), 16);
    assert!(levels.levels().windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn syk_ratio_ordering_follows_class() {
    let workers = Workers::new(0).unwrap();
    let first_ratio = |n: usize, m: u64| {
        let sampler = SykSampler::new(SykConfig::new(n, 1.0, 40)).unwrap();
        ratios(&protocol1(&sampler, 0.0, 1, m, &workers).unwrap()).unwrap()[0]
    };
    // 16, 14 and 12 Majoranas: orthogonal, unitary, symplectic
    let (orth, unit, symp) = (first_ratio(16, 400), first_ratio(14, 600), first_ratio(12, 1500));
    assert!(orth.value < unit.value, "{orth:?} {unit:?}");
    assert!(unit.value < symp.value, "{unit:?} {symp:?}");
}
