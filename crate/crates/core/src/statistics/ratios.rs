//! Quantities derived from mean local spacings: ratios to the zeroth mean,
//! spacing autocovariances, and local r-ratios.

use serde::Serialize;

use crate::error::{arg_err, Result};
use crate::spacing::LocalSpacingRecord;

use super::accumulator::{RunningStats, SpacingStats, Z99};
use super::histogram::Histogram;

/// A derived value at lag `ell` with its first-order standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LagEstimate {
    pub ell: usize,
    pub value: f64,
    pub stderr: f64,
}

impl LagEstimate {
    pub fn ci99(&self) -> f64 {
        Z99 * self.stderr
    }
}

/// `⟨s_ℓ⟩/⟨s_0⟩` for `ℓ = 1..=max_ell`. Errors propagate to first order,
/// including the covariance between numerator and denominator.
pub fn ratios(stats: &SpacingStats) -> Result<Vec<LagEstimate>> {
    let m0 = stats.mean(0);
    if !(m0 > 0.0) {
        return arg_err(format!("zeroth mean must be positive, got {m0}"));
    }
    let n = stats.count() as f64;
    let v0 = stats.variance(0);
    Ok((1..=stats.max_ell())
        .map(|ell| {
            let m = stats.mean(ell);
            let value = m / m0;
            // var(a/b) ≈ (var a - 2ρ cov + ρ² var b) / b²
            let var = (stats.variance(ell) - 2.0 * value * stats.covariance_with_zeroth(ell) + value * value * v0)
                / (m0 * m0 * n);
            LagEstimate { ell, value, stderr: var.max(0.0).sqrt() }
        })
        .collect())
}

/// Ratios built from means averaged over several reference points
/// (each entry one point). Points are treated as independent when
/// combining errors.
pub fn ratios_multi_point(per_point: &[SpacingStats]) -> Result<Vec<LagEstimate>> {
    let Some(first) = per_point.first() else {
        return arg_err("no reference points");
    };
    let max_ell = first.max_ell();
    if per_point.iter().any(|s| s.max_ell() != max_ell) {
        return arg_err("reference points disagree on max_ell");
    }
    let k = per_point.len() as f64;
    let avg = |f: &dyn Fn(&SpacingStats) -> f64| per_point.iter().map(f).sum::<f64>() / k;
    let m0 = avg(&|s| s.mean(0));
    if !(m0 > 0.0) {
        return arg_err(format!("zeroth mean must be positive, got {m0}"));
    }
    // variances of the averaged means
    let var_of_avg = |f: &dyn Fn(&SpacingStats) -> f64| {
        per_point.iter().map(|s| f(s) / s.count() as f64).sum::<f64>() / (k * k)
    };
    let v0 = var_of_avg(&|s| s.variance(0));
    Ok((1..=max_ell)
        .map(|ell| {
            let m = avg(&|s| s.mean(ell));
            let value = m / m0;
            let v = var_of_avg(&|s| s.variance(ell));
            let c = var_of_avg(&|s| s.covariance_with_zeroth(ell));
            let var = (v - 2.0 * value * c + value * value * v0) / (m0 * m0);
            LagEstimate { ell, value, stderr: var.max(0.0).sqrt() }
        })
        .collect())
}

/// Spacing autocovariance `cov[s_k, s_{k+ℓ}] = Δ² (⟨s_ℓ⟩/Δ - 1)` read off mean
/// local spacings, for `ℓ = 0..=max_ell`. `delta` is the mean consecutive
/// spacing in the units of `stats`.
pub fn covariance_from_means(stats: &SpacingStats, delta: f64) -> Vec<LagEstimate> {
    (0..=stats.max_ell())
        .map(|ell| LagEstimate {
            ell,
            value: delta * delta * (stats.mean(ell) / delta - 1.0),
            stderr: delta * stats.stderr(ell),
        })
        .collect()
}

/// Streaming statistics of `r_ℓ = s_{ℓ+1}/s_ℓ` for `ℓ = 0..=max_ell`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalRStats {
    pub means: Vec<RunningStats>,
    pub histograms: Vec<Histogram>,
    /// Raw values for the first `kept.len()` lags, for distribution tests.
    pub kept: Vec<Vec<f64>>,
}

impl LocalRStats {
    /// Histograms use `bins` bins on `[0, r_max]`; raw values are kept for
    /// lags below `keep`.
    pub fn new(max_ell: usize, bins: usize, r_max: f64, keep: usize) -> Result<Self> {
        Ok(Self {
            means: vec![RunningStats::new(); max_ell + 1],
            histograms: (0..=max_ell).map(|_| Histogram::new(bins, r_max)).collect::<Result<_>>()?,
            kept: vec![Vec::new(); keep.min(max_ell + 1)],
        })
    }

    pub fn max_ell(&self) -> usize {
        self.means.len() - 1
    }

    /// Needs at least `max_ell + 2` spacings.
    pub fn push(&mut self, spacings: &[f64]) -> Result<()> {
        if spacings.len() < self.means.len() + 1 {
            return arg_err(format!(
                "record has {} spacings, need {}",
                spacings.len(),
                self.means.len() + 1
            ));
        }
        for ell in 0..self.means.len() {
            let r = spacings[ell + 1] / spacings[ell];
            self.means[ell].push(r);
            self.histograms[ell].push(r);
            if let Some(k) = self.kept.get_mut(ell) {
                k.push(r);
            }
        }
        Ok(())
    }

    pub fn merge(&mut self, other: Self) {
        for (a, b) in self.means.iter_mut().zip(&other.means) {
            a.merge(b);
        }
        for (a, b) in self.histograms.iter_mut().zip(&other.histograms) {
            a.merge(b);
        }
        for (a, b) in self.kept.iter_mut().zip(other.kept) {
            a.extend(b);
        }
    }

    pub fn mean_estimates(&self) -> Vec<LagEstimate> {
        self.means
            .iter()
            .enumerate()
            .map(|(ell, s)| LagEstimate { ell, value: s.mean(), stderr: s.stderr() })
            .collect()
    }
}

/// Default histogram range for r-ratios.
pub const R_BINS: usize = 200;
pub const R_MAX: f64 = 10.0;

/// Local r-ratio statistics over a set of records.
pub fn local_r_stats<'a>(records: impl IntoIterator<Item = &'a LocalSpacingRecord>, max_ell: usize) -> Result<LocalRStats> {
    let mut out = LocalRStats::new(max_ell, R_BINS, R_MAX, 2)?;
    for r in records {
        out.push(&r.spacings)?;
    }
    Ok(out)
}
