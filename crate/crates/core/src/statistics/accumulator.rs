//! Mergeable streaming moments.
//!
//! Updates follow Welford; merges follow Chan et al. Both work on centred
//! quantities, so results do not depend on summation order beyond rounding
//! and partial accumulators from different workers combine exactly like a
//! single pass.

use std::fmt::Write as _;

use serde::Serialize;

/// Normal quantile for a two-sided 99% interval.
pub const Z99: f64 = 2.576;

/// Count, mean and centred second moment of a scalar stream.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = self.count + other.count;
        let d = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        self.mean += d * nb / n as f64;
        self.m2 += other.m2 + d * d * na * nb / n as f64;
        self.count = n;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (0 for fewer than two values).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        (self.variance() / self.count as f64).sqrt()
    }

    pub fn ci99(&self) -> f64 {
        Z99 * self.stderr()
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        iter.into_iter().for_each(|x| s.push(x));
        s
    }
}

/// Per-`ℓ` moments of local spacing records, plus the co-moment of every
/// `s_ℓ` with `s_0` (needed for ratio error bars).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpacingStats {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
    co0: Vec<f64>,
    /// Samples or reference points attempted and those skipped.
    pub attempted: u64,
    pub failed: u64,
}

/// One output row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpacingRow {
    pub ell: usize,
    pub mean: f64,
    pub stderr: f64,
    pub ci99: f64,
    pub count: u64,
}

impl SpacingStats {
    pub fn new(max_ell: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; max_ell + 1],
            m2: vec![0.0; max_ell + 1],
            co0: vec![0.0; max_ell + 1],
            attempted: 0,
            failed: 0,
        }
    }

    pub fn max_ell(&self) -> usize {
        self.mean.len() - 1
    }

    /// Adds one record; entries beyond `max_ell` are ignored.
    ///
    /// # Panics
    /// If the record is shorter than `max_ell + 1`.
    pub fn push(&mut self, spacings: &[f64]) {
        let len = self.mean.len();
        assert!(spacings.len() >= len, "record shorter than max_ell + 1");
        self.count += 1;
        let n = self.count as f64;
        let d0 = spacings[0] - self.mean[0];
        for l in 0..len {
            let x = spacings[l];
            let d = x - self.mean[l];
            self.mean[l] += d / n;
            let after = x - self.mean[l];
            self.m2[l] += d * after;
            self.co0[l] += d0 * after;
        }
    }

    pub fn merge(&mut self, other: &Self) {
        assert_eq!(self.mean.len(), other.mean.len(), "merging stats of different depth");
        self.attempted += other.attempted;
        self.failed += other.failed;
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            self.count = other.count;
            self.mean.clone_from(&other.mean);
            self.m2.clone_from(&other.m2);
            self.co0.clone_from(&other.co0);
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let d0 = other.mean[0] - self.mean[0];
        for l in 0..self.mean.len() {
            let d = other.mean[l] - self.mean[l];
            self.m2[l] += other.m2[l] + d * d * na * nb / n;
            self.co0[l] += other.co0[l] + d0 * d * na * nb / n;
            self.mean[l] += d * nb / n;
        }
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self, ell: usize) -> f64 {
        self.mean[ell]
    }

    pub fn means(&self) -> &[f64] {
        &self.mean
    }

    pub fn variance(&self, ell: usize) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2[ell] / (self.count - 1) as f64
        }
    }

    /// Sample covariance of `s_0` and `s_ell`.
    pub fn covariance_with_zeroth(&self, ell: usize) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.co0[ell] / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self, ell: usize) -> f64 {
        (self.variance(ell) / self.count as f64).sqrt()
    }

    pub fn ci99(&self, ell: usize) -> f64 {
        Z99 * self.stderr(ell)
    }

    pub fn rows(&self) -> Vec<SpacingRow> {
        (0..self.mean.len())
            .map(|ell| SpacingRow {
                ell,
                mean: self.mean(ell),
                stderr: self.stderr(ell),
                ci99: self.ci99(ell),
                count: self.count,
            })
            .collect()
    }

    /// Rescales as if every spacing had been multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.mean.iter_mut().for_each(|m| *m *= factor);
        out.m2.iter_mut().for_each(|m| *m *= factor * factor);
        out.co0.iter_mut().for_each(|m| *m *= factor * factor);
        out
    }

    /// CSV with columns `ell,mean,stderr,ci99,count`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("ell,mean,stderr,ci99,count\n");
        for r in self.rows() {
            let _ = writeln!(s, "{},{:.16e},{:.16e},{:.16e},{}", r.ell, r.mean, r.stderr, r.ci99, r.count);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn running_stats_basics() {
        let s: RunningStats = [1.0, 2.0, 3.0, 4.0].into_iter().collect();
        assert_eq!(s.count(), 4);
        assert!((s.mean() - 2.5).abs() < 1e-15);
        assert!((s.variance() - 5.0 / 3.0).abs() < 1e-15);
        assert!((s.ci99() - Z99 * (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn constant_records_have_zero_variance() {
        let mut st = SpacingStats::new(3);
        for _ in 0..100 {
            st.push(&[1.0, 1.0, 1.0, 1.0]);
        }
        for l in 0..=3 {
            assert_eq!(st.mean(l), 1.0);
            assert_eq!(st.variance(l), 0.0);
        }
    }

    #[test]
    fn covariance_matches_two_pass() {
        let recs: Vec<[f64; 2]> = (0..50).map(|i| [i as f64 * 0.3 + 1.0, (i as f64).sin()]).collect();
        let mut st = SpacingStats::new(1);
        recs.iter().for_each(|r| st.push(r));
        let n = recs.len() as f64;
        let m0 = recs.iter().map(|r| r[0]).sum::<f64>() / n;
        let m1 = recs.iter().map(|r| r[1]).sum::<f64>() / n;
        let c = recs.iter().map(|r| (r[0] - m0) * (r[1] - m1)).sum::<f64>() / (n - 1.0);
        assert!((st.covariance_with_zeroth(1) - c).abs() < 1e-12);
        assert!((st.covariance_with_zeroth(0) - st.variance(0)).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let mut st = SpacingStats::new(1);
        st.push(&[2.0, 1.0]);
        st.push(&[2.0, 1.0]);
        let csv = st.to_csv();
        assert!(csv.starts_with("ell,mean,stderr,ci99,count\n0,2.0000000000000000e0,"));
        assert_eq!(csv.lines().count(), 3);
    }

    proptest! {
        #[test]
        fn merge_is_partition_independent(
            data in proptest::collection::vec((0.01f64..10.0, 0.01f64..10.0, 0.01f64..10.0), 2..300),
            cut in 0usize..300,
        ) {
            let cut = cut % data.len();
            let mut whole = SpacingStats::new(2);
            let mut left = SpacingStats::new(2);
            let mut right = SpacingStats::new(2);
            for (i, (a, b, c)) in data.iter().enumerate() {
                let r = [*a, *b, *c];
                whole.push(&r);
                if i < cut { left.push(&r) } else { right.push(&r) }
            }
            // reverse merge order as well
            let mut merged = right.clone();
            merged.merge(&left);
            for l in 0..=2 {
                let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(1e-300);
                prop_assert!(rel(whole.mean(l), merged.mean(l)) < 1e-10);
                prop_assert!(rel(whole.variance(l), merged.variance(l)) < 1e-10);
                prop_assert!((whole.covariance_with_zeroth(l) - merged.covariance_with_zeroth(l)).abs()
                    < 1e-10 * whole.variance(0).max(whole.variance(l)).max(1e-12));
            }
        }

        #[test]
        fn scaling_commutes_with_accumulation(
            data in proptest::collection::vec((0.01f64..10.0, 0.01f64..10.0), 2..100),
            c in 0.001f64..1000.0,
        ) {
            let mut a = SpacingStats::new(1);
            let mut b = SpacingStats::new(1);
            for (x, y) in &data {
                a.push(&[*x, *y]);
                b.push(&[x * c, y * c]);
            }
            let a = a.scaled(c);
            for l in 0..=1 {
                prop_assert!((a.mean(l) - b.mean(l)).abs() <= 1e-12 * b.mean(l).abs());
            }
        }
    }
}
