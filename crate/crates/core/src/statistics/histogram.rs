//! Uniform histograms, Kolmogorov–Smirnov distances and origin power-law
//! fits.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{arg_err, LlsError, Result};
use crate::spacing::LocalSpacingRecord;

pub const DEFAULT_BINS: usize = 200;
pub const DEFAULT_S_MAX: f64 = 4.0;

/// Fewest records accepted by [`histogram_p0`].
pub const MIN_P0_RECORDS: usize = 10_000;

/// Uniform bins on `[0, s_max)`. Values at or beyond `s_max` go to
/// `overflow`; negative values are rejected.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    s_max: f64,
    counts: Vec<u64>,
    overflow: u64,
}

impl Histogram {
    pub fn new(bins: usize, s_max: f64) -> Result<Self> {
        if bins == 0 || !(s_max > 0.0 && s_max.is_finite()) {
            return arg_err(format!("need bins ≥ 1 and finite s_max > 0, got {bins}, {s_max}"));
        }
        Ok(Self { s_max, counts: vec![0; bins], overflow: 0 })
    }

    pub fn push(&mut self, x: f64) {
        debug_assert!(x >= 0.0, "negative histogram entry {x}");
        let i = (x / self.width()) as usize;
        match self.counts.get_mut(i) {
            Some(c) => *c += 1,
            None => self.overflow += 1,
        }
    }

    pub fn merge(&mut self, other: &Self) {
        assert_eq!(self.counts.len(), other.counts.len(), "histograms differ in binning");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.overflow += other.overflow;
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn width(&self) -> f64 {
        self.s_max / self.counts.len() as f64
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.overflow
    }

    pub fn bin_left(&self, i: usize) -> f64 {
        i as f64 * self.width()
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.width()
    }

    /// Count / (total × width). Integrates to one minus the overflow
    /// fraction.
    pub fn density(&self) -> Vec<f64> {
        let norm = self.total() as f64 * self.width();
        self.counts.iter().map(|&c| c as f64 / norm).collect()
    }

    /// Largest `|density - f|` over bin centres.
    pub fn sup_distance(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.density()
            .iter()
            .enumerate()
            .map(|(i, d)| (d - f(self.bin_center(i))).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with columns `bin_left,density`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bin_left,density\n");
        for (i, d) in self.density().iter().enumerate() {
            let _ = writeln!(s, "{:.16e},{:.16e}", self.bin_left(i), d);
        }
        s
    }
}

/// Histogram of the zeroth local spacing.
pub fn histogram_p0<'a>(
    records: impl IntoIterator<Item = &'a LocalSpacingRecord>,
    bins: usize,
    s_max: f64,
) -> Result<Histogram> {
    let mut h = Histogram::new(bins, s_max)?;
    for r in records {
        h.push(r.spacings[0]);
    }
    if (h.total() as usize) < MIN_P0_RECORDS {
        return Err(LlsError::InsufficientLevels { found: h.total() as usize, needed: MIN_P0_RECORDS });
    }
    Ok(h)
}

/// Histogram of plain consecutive spacings, for overlay with [`histogram_p0`].
pub fn histogram_spacings(values: impl IntoIterator<Item = f64>, bins: usize, s_max: f64) -> Result<Histogram> {
    let mut h = Histogram::new(bins, s_max)?;
    values.into_iter().for_each(|v| h.push(v));
    Ok(h)
}

/// One-sample Kolmogorov–Smirnov distance. Sorts `samples` in place.
pub fn ks_one_sample(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov distance. Sorts both inputs in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Exponent of a power law `x^a` fitted near zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub stderr: f64,
    /// The fit used samples in `[upper/10, upper]`.
    pub upper: f64,
    pub count: usize,
}

/// Maximum-likelihood exponent of a density `∝ x^a` truncated to the
/// smallest decade `[b/10, b]` holding at least `min_count` samples.
pub fn origin_power_law(samples: &[f64], min_count: usize) -> Result<PowerLawFit> {
    if min_count < 2 {
        return arg_err("min_count must be at least 2");
    }
    let mut xs: Vec<f64> = samples.iter().copied().filter(|x| *x > 0.0).collect();
    xs.sort_by(f64::total_cmp);
    let mut chosen = None;
    for k in min_count - 1..xs.len() {
        let b = xs[k];
        let first = xs.partition_point(|&x| x < 0.1 * b);
        if k + 1 - first >= min_count {
            chosen = Some((first, k));
            break;
        }
    }
    let Some((first, last)) = chosen else {
        return Err(LlsError::InsufficientLevels { found: xs.len(), needed: min_count });
    };
    let upper = xs[last];
    let window = &xs[first..=last];
    let n = window.len() as f64;
    let sum_log: f64 = window.iter().map(|x| (x / upper).ln()).sum();
    let ln_c = 0.1f64.ln();
    // score of the truncated law on [c, 1]; decreasing in a
    let score = |a: f64| {
        let ca = (ln_c * (a + 1.0)).exp();
        n / (a + 1.0) + n * ca * ln_c / (1.0 - ca) + sum_log
    };
    let (mut lo, mut hi) = (-0.999, 60.0);
    if score(lo) < 0.0 || score(hi) > 0.0 {
        return Err(LlsError::Precision("power-law exponent outside (-1, 60)".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if score(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    let ca = (ln_c * (a + 1.0)).exp();
    let info = n * (1.0 / (a + 1.0).powi(2) - ln_c * ln_c * ca / (1.0 - ca).powi(2));
    Ok(PowerLawFit {
        exponent: a,
        stderr: 1.0 / info.sqrt(),
        upper,
        count: window.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::sample_rng;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn overflow_and_density() {
        let mut h = Histogram::new(4, 2.0).unwrap();
        for x in [0.1, 0.6, 0.6, 1.9, 2.0, 7.0] {
            h.push(x);
        }
        assert_eq!(h.counts(), &[1, 2, 0, 1]);
        assert_eq!(h.overflow(), 2);
        let d = h.density();
        assert!((d[1] - 2.0 / (6.0 * 0.5)).abs() < 1e-15);
        assert!(h.to_csv().starts_with("bin_left,density\n0.0000000000000000e0,"));
    }

    #[test]
    fn p0_needs_enough_records() {
        let recs = vec![LocalSpacingRecord { phi: 0.0, anchor: 0, spacings: vec![1.0] }; 10];
        assert!(histogram_p0(&recs, 10, 4.0).is_err());
    }

    #[test]
    fn ks_against_uniform() {
        let mut rng = sample_rng(3, 0);
        let mut xs: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
        let d = ks_one_sample(&mut xs, |x| x.clamp(0.0, 1.0));
        assert!(d < 0.015, "{d}");
        let mut ys: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
        assert!(ks_two_sample(&mut xs, &mut ys) < 0.02);
        let mut shifted: Vec<f64> = ys.iter().map(|y| y + 0.1).collect();
        assert!((ks_two_sample(&mut ys, &mut shifted) - 0.1).abs() < 0.01);
    }

    #[test]
    fn power_law_recovers_exponent() {
        // x = U^{1/(a+1)} has density (a+1) x^a on [0, 1]
        let mut rng = sample_rng(11, 0);
        for a in [1.0, 2.0, 3.0] {
            let xs: Vec<f64> = (0..400_000).map(|_| rng.random::<f64>().powf(1.0 / (a + 1.0))).collect();
            let fit = origin_power_law(&xs, 5000).unwrap();
            assert!((fit.exponent - a).abs() < 4.0 * fit.stderr, "{a}: {fit:?}");
            assert!(fit.count >= 5000 && fit.upper < 1.0);
        }
    }

    proptest! {
        #[test]
        fn density_plus_overflow_integrates_to_one(
            xs in proptest::collection::vec(0.0f64..6.0, 1..500),
            bins in 1usize..300,
        ) {
            let mut h = Histogram::new(bins, 4.0).unwrap();
            xs.iter().for_each(|&x| h.push(x));
            let integral: f64 = h.density().iter().sum::<f64>() * h.width();
            let over = h.overflow() as f64 / h.total() as f64;
            prop_assert!((integral + over - 1.0).abs() < 1e-9);
        }
    }
}
