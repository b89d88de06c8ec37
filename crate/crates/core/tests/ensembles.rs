use std::f64::consts::{PI, TAU};

use lls_core::ensembles::{sample_poisson_line, EnsembleConfig, EnsembleSampler, Method};
use lls_core::statistics::{ks_one_sample, ks_two_sample, protocol1, Workers};
use proptest::prelude::*;

/// KS critical value at the 0.1% level.
fn ks_bound(n: usize) -> f64 {
    1.95 / (n as f64).sqrt()
}

/// For two levels the relative angle has density sin²(δ/2)/π. Alternating
/// which of the two gaps is taken symmetrizes the ordered-pair bias.
fn two_level_gaps(method: Method, samples: u64) -> Vec<f64> {
    let sampler = EnsembleSampler::new(EnsembleConfig::new(2, 2, 11).with_method(method)).unwrap();
    (0..samples)
        .map(|i| {
            let a = sampler.spectrum(i).unwrap();
            let d = a.angles()[1] - a.angles()[0];
            if i % 2 == 0 {
                d
            } else {
                TAU - d
            }
        })
        .collect()
}

#[test]
fn two_level_unitary_law() {
    for method in [Method::Cmv, Method::HaarQr] {
        let mut gaps = two_level_gaps(method, 20_000);
        let n = gaps.len();
        let ks = ks_one_sample(&mut gaps, |d| (d - d.sin()) / TAU);
        assert!(ks < ks_bound(n), "{method:?}: KS {ks}");
    }
}

#[test]
fn cmv_and_dense_haar_agree() {
    let draws = 5000;
    let zeroth = |method| -> Vec<f64> {
        let s = EnsembleSampler::new(EnsembleConfig::new(2, 16, 5).with_method(method)).unwrap();
        (0..draws).map(|i| s.local_record(i, PI, 2).unwrap().spacings[0]).collect()
    };
    let (mut a, mut b) = (zeroth(Method::Cmv), zeroth(Method::HaarQr));
    let ks = ks_two_sample(&mut a, &mut b);
    assert!(ks < 1.95 * (2.0 / draws as f64).sqrt(), "KS {ks}");
}

#[test]
fn straddling_gap_exceeds_every_later_gap() {
    let workers = Workers::new(0).unwrap();
    for beta in [0u8, 1, 2, 4] {
        let sampler = EnsembleSampler::new(EnsembleConfig::new(beta, 32, 3)).unwrap();
        let stats = protocol1(&sampler, 1.0, 4, 20_000, &workers).unwrap();
        let s0 = stats.mean(0);
        assert!(s0 - 1.0 > 5.0 * stats.stderr(0), "β={beta}: <s_0> = {s0}");
        for ell in 1..=4 {
            assert!(s0 > stats.mean(ell), "β={beta}, ℓ={ell}");
        }
    }
}

#[test]
fn poisson_line_gaps_are_exponential() {
    let line = sample_poisson_line(1.0, 20_001, 9).unwrap();
    let mut gaps: Vec<f64> = line.levels().windows(2).map(|w| w[1] - w[0]).collect();
    let n = gaps.len();
    let ks = ks_one_sample(&mut gaps, |g| 1.0 - (-g).exp());
    assert!(ks < ks_bound(n), "KS {ks}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectra_sorted_on_the_circle(beta in prop::sample::select(vec![0u8, 1, 2, 4]), n in 2usize..48, seed: u64, index in 0u64..1000) {
        let s = EnsembleSampler::new(EnsembleConfig::new(beta, n, seed)).unwrap();
        let a = s.spectrum(index).unwrap();
        prop_assert_eq!(a.angles().len(), n);
        prop_assert!(a.angles().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(a.angles().iter().all(|x| (0.0..TAU).contains(x)));
        let again = s.spectrum(index).unwrap();
        prop_assert_eq!(a.angles(), again.angles());
    }

    #[test]
    fn full_local_record_closes_the_circle(beta in prop::sample::select(vec![1u8, 2, 4]), n in 4usize..40, seed: u64, phi in 0.0..TAU) {
        let s = EnsembleSampler::new(EnsembleConfig::new(beta, n, seed)).unwrap();
        let rec = s.local_record(0, phi, n - 1).unwrap();
        let total: f64 = rec.spacings.iter().sum();
        prop_assert!(rec.spacings.iter().all(|x| *x >= 0.0));
        // N gaps of mean 2π/N
        prop_assert!((total - n as f64).abs() < 1e-9 * n as f64, "total {}", total);
    }
}
