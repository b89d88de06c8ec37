//! Sampling protocols: fixed reference point over an ensemble, many
//! reference points on one long spectrum, and one reference point per
//! parameter draw.

use rand::Rng;
use rayon::prelude::*;

use crate::ensembles::EnsembleSampler;
use crate::error::{arg_err, LlsError, Result};
use crate::rng::sample_rng;
use crate::spacing::{LineSpectrum, LocalSpacingRecord};

use super::accumulator::SpacingStats;

/// Samples per work unit. Fixed so that results do not depend on how many
/// threads run.
pub const CHUNK: u64 = 256;

/// Ensemble runs tolerate this fraction of failed samples.
pub const MAX_SAMPLE_FAILURE: f64 = 0.01;
/// Reference-point runs tolerate this fraction of skipped windows.
pub const MAX_SKIP_FRACTION: f64 = 0.05;

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "LLS_LAB_THREADS";

/// A private thread pool.
pub struct Workers {
    pool: rayon::ThreadPool,
}

impl Workers {
    /// `threads = 0` picks the number of available cores.
    pub fn new(threads: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| LlsError::Resource(format!("thread pool: {e}")))?;
        Ok(Self { pool })
    }

    /// Reads the worker count from `LLS_LAB_THREADS`, defaulting to all cores.
    pub fn from_env() -> Result<Self> {
        match std::env::var(THREADS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) => Self::new(n),
                Err(_) => arg_err(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}")),
            },
            Err(_) => Self::new(0),
        }
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Folds `step` over indices `0..total` in fixed chunks, then merges the
    /// chunk results in index order.
    pub fn fold_indices<A, I, S, M>(&self, total: u64, init: I, step: S, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync,
        S: Fn(&mut A, u64) + Sync,
        M: Fn(&mut A, A),
    {
        let chunks = total.div_ceil(CHUNK);
        let parts: Vec<A> = self.pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut acc = init();
                    for i in c * CHUNK..((c + 1) * CHUNK).min(total) {
                        step(&mut acc, i);
                    }
                    acc
                })
                .collect()
        });
        let mut out = init();
        for p in parts {
            merge(&mut out, p);
        }
        out
    }

    /// Parallel ordered map.
    pub fn map<T, U, F>(&self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map(f).collect())
    }
}

/// Anything that yields independent local spacing records by sample index.
pub trait SampleSource: Sync {
    fn local_record(&self, index: u64, phi: f64, max_ell: usize) -> Result<LocalSpacingRecord>;
}

impl SampleSource for EnsembleSampler {
    fn local_record(&self, index: u64, phi: f64, max_ell: usize) -> Result<LocalSpacingRecord> {
        EnsembleSampler::local_record(self, index, phi, max_ell)
    }
}

impl<F> SampleSource for F
where
    F: Fn(u64, f64, usize) -> Result<LocalSpacingRecord> + Sync,
{
    fn local_record(&self, index: u64, phi: f64, max_ell: usize) -> Result<LocalSpacingRecord> {
        self(index, phi, max_ell)
    }
}

fn check_failures(stats: &SpacingStats, limit: f64, what: &str) -> Result<()> {
    if stats.failed as f64 > limit * stats.attempted as f64 || stats.count() == 0 {
        return Err(LlsError::RunFailed {
            failed: stats.failed as usize,
            total: stats.attempted as usize,
            reason: format!("more than {}% of {what} failed", limit * 100.0),
        });
    }
    if stats.failed > 0 {
        log::warn!("{} of {} {what} skipped", stats.failed, stats.attempted);
    }
    Ok(())
}

/// Fixed reference point, `samples` independent spectra. Means come out in
/// whatever units the source reports.
pub fn protocol1<S: SampleSource + ?Sized>(
    source: &S,
    phi: f64,
    max_ell: usize,
    samples: u64,
    workers: &Workers,
) -> Result<SpacingStats> {
    if samples == 0 {
        return arg_err("at least one sample is required");
    }
    let stats = workers.fold_indices(
        samples,
        || SpacingStats::new(max_ell),
        |acc, i| {
            acc.attempted += 1;
            match source.local_record(i, phi, max_ell) {
                Ok(r) => acc.push(&r.spacings),
                Err(e) => {
                    log::debug!("sample {i}: {e}");
                    acc.failed += 1;
                }
            }
        },
        |a, b| a.merge(&b),
    );
    check_failures(&stats, MAX_SAMPLE_FAILURE, "samples")?;
    Ok(stats)
}

/// Minimum distance between reference points on a line spectrum.
pub fn min_separation(spectrum: &LineSpectrum, max_ell: usize) -> Result<f64> {
    let gap = spectrum
        .mean_gap()
        .ok_or_else(|| LlsError::InsufficientLevels { found: spectrum.len(), needed: 2 })?;
    Ok((max_ell + 2) as f64 * gap)
}

/// Many reference points on one spectrum. Points must be at least
/// `(max_ell + 2)` mean gaps apart; windows that run off the spectrum are
/// skipped and counted.
pub fn protocol2_points(spectrum: &LineSpectrum, phis: &[f64], max_ell: usize) -> Result<SpacingStats> {
    if phis.is_empty() {
        return arg_err("at least one reference point is required");
    }
    let sep = min_separation(spectrum, max_ell)?;
    let mut sorted = phis.to_vec();
    sorted.sort_by(f64::total_cmp);
    if let Some(w) = sorted.windows(2).find(|w| w[1] - w[0] < sep * (1.0 - 1e-12)) {
        return arg_err(format!(
            "reference points {} and {} closer than the minimum separation {sep}",
            w[0], w[1]
        ));
    }
    let mut stats = SpacingStats::new(max_ell);
    for &phi in phis {
        stats.attempted += 1;
        match spectrum.local_spacings(phi, max_ell) {
            Ok(r) => stats.push(&r.spacings),
            Err(e @ (LlsError::WindowUnderflow { .. } | LlsError::DegenerateReference { .. })) => {
                log::debug!("reference point {phi}: {e}");
                stats.failed += 1;
            }
            Err(e) => return Err(e),
        }
    }
    check_failures(&stats, MAX_SKIP_FRACTION, "reference points")?;
    Ok(stats)
}

/// `count` random reference points inside the spectrum, one per equal cell,
/// jittered so that neighbours keep the minimum separation.
pub fn spaced_reference_points(spectrum: &LineSpectrum, count: usize, max_ell: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return arg_err("at least one reference point is required");
    }
    let sep = min_separation(spectrum, max_ell)?;
    let levels = spectrum.levels();
    // keep one level below and max_ell + 1 above every window
    let (lo, hi) = (levels[0] + 0.5 * sep, levels[levels.len() - 1] - sep);
    let cell = (hi - lo) / count as f64;
    if !(cell >= sep) {
        return Err(LlsError::InsufficientLevels {
            found: levels.len(),
            needed: ((count + 2) as f64 * sep / spectrum.mean_gap().unwrap_or(1.0)).ceil() as usize,
        });
    }
    let mut rng = sample_rng(seed, 0);
    Ok((0..count)
        .map(|i| lo + i as f64 * cell + rng.random::<f64>() * (cell - sep))
        .collect())
}

/// One record per parameter draw. `family(q)` returns the spectrum for the
/// `q`-th draw together with its reference point.
pub fn protocol2_param<F>(family: F, max_ell: usize, draws: u64, workers: &Workers) -> Result<SpacingStats>
where
    F: Fn(u64) -> Result<(LineSpectrum, f64)> + Sync,
{
    if draws == 0 {
        return arg_err("at least one parameter draw is required");
    }
    let stats = workers.fold_indices(
        draws,
        || SpacingStats::new(max_ell),
        |acc, q| {
            acc.attempted += 1;
            match family(q).and_then(|(spec, phi)| spec.local_spacings(phi, max_ell)) {
                Ok(r) => acc.push(&r.spacings),
                Err(e) => {
                    log::debug!("draw {q}: {e}");
                    acc.failed += 1;
                }
            }
        },
        |a, b| a.merge(&b),
    );
    check_failures(&stats, MAX_SKIP_FRACTION, "parameter draws")?;
    Ok(stats)
}
