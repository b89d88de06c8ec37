//! Seeded samplers for the circular β-ensembles and Poisson spectra.

mod cmv;
mod haar;

pub use cmv::Verblunsky;
pub use haar::haar_unitary;

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, LlsError, Result};
use crate::linalg::unitary_eigenangles;
use crate::rng::{derived_seed, sample_rng, SampleRng};
use crate::spacing::{CircularSpectrum, LineSpectrum, LocalSpacingRecord, Scale};

/// Resampling attempts after a rejected draw.
const MAX_ATTEMPTS: u64 = 4;
/// Allowed sortedness violation before a spectrum is rejected.
const SORT_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Cmv,
    HaarQr,
}

impl std::str::FromStr for Method {
    type Err = LlsError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cmv" => Ok(Method::Cmv),
            "haar_qr" | "haar-qr" => Ok(Method::HaarQr),
            other => arg_err(format!("unknown method '{other}'")),
        }
    }
}

/// `beta = 0` selects the Poisson circle and ignores `method`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub beta: u8,
    pub n_levels: usize,
    pub seed: u64,
    #[serde(default)]
    pub method: Method,
}

impl EnsembleConfig {
    pub fn new(beta: u8, n_levels: usize, seed: u64) -> Self {
        Self { beta, n_levels, seed, method: Method::Cmv }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.beta, 0 | 1 | 2 | 4) {
            return arg_err(format!("beta must be 0, 1, 2 or 4, got {}", self.beta));
        }
        if self.n_levels == 0 {
            return arg_err("n_levels must be positive");
        }
        if self.beta != 0 && self.n_levels < 2 {
            return arg_err("circular ensembles need N >= 2");
        }
        if self.beta != 0 && self.method == Method::HaarQr && self.beta != 2 {
            return arg_err("haar_qr is only available for beta = 2");
        }
        Ok(())
    }
}

/// Draws independent spectra from one configuration. Sample `i` uses its own
/// random stream, so any subset of indices can be produced in any order.
#[derive(Debug, Clone)]
pub struct EnsembleSampler {
    config: EnsembleConfig,
}

impl EnsembleSampler {
    pub fn new(config: EnsembleConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config })
    }

    pub fn config(&self) -> &EnsembleConfig {
        &self.config
    }

    fn rng(&self, index: u64, attempt: u64) -> SampleRng {
        let seed = if attempt == 0 {
            self.config.seed
        } else {
            derived_seed(self.config.seed, attempt)
        };
        sample_rng(seed, index)
    }

    fn retry<T>(&self, index: u64, mut draw: impl FnMut(&mut SampleRng) -> Result<T>) -> Result<T> {
        let mut last = String::new();
        for attempt in 0..MAX_ATTEMPTS {
            match draw(&mut self.rng(index, attempt)) {
                Ok(v) => return Ok(v),
                Err(e) => {
                    log::debug!("sample {index} attempt {attempt} rejected: {e}");
                    last = e.to_string();
                }
            }
        }
        Err(LlsError::SamplerFailure { seed: self.config.seed, reason: last })
    }

    /// Full spectrum of sample `index`.
    pub fn spectrum(&self, index: u64) -> Result<CircularSpectrum> {
        let n = self.config.n_levels;
        let beta = self.config.beta;
        match (beta, self.config.method) {
            (0, _) => Ok(poisson_circle_from(n, &mut self.rng(index, 0))),
            (_, Method::Cmv) => self.retry(index, |rng| {
                let v = Verblunsky::sample_cbe(beta as f64, n, rng);
                checked_spectrum(v.eigenangles()?)
            }),
            (_, Method::HaarQr) => self.retry(index, |rng| {
                let u = haar_unitary(n, rng);
                checked_spectrum(unitary_eigenangles(&u)?)
            }),
        }
    }

    /// Local spacings of sample `index` at `phi`, in units of the mean
    /// spacing. For the CMV route only the `max_ell + 2` eigen-angles around
    /// `phi` are computed; for the other routes the full spectrum is used.
    pub fn local_record(&self, index: u64, phi: f64, max_ell: usize) -> Result<LocalSpacingRecord> {
        let n = self.config.n_levels;
        if !(0.0..TAU).contains(&phi) {
            return arg_err(format!("phi = {phi} outside [0, 2pi)"));
        }
        if max_ell == 0 || max_ell > n.saturating_sub(1) {
            return arg_err(format!("max_ell must lie in [1, N-1], got {max_ell}"));
        }
        let delta = TAU / n as f64;
        if self.config.beta != 0 && self.config.method == Method::Cmv {
            let beta = self.config.beta as f64;
            return self.retry(index, |rng| {
                let v = Verblunsky::sample_cbe(beta, n, rng);
                let (anchor, roots) = v.angles_around(phi, max_ell + 2)?;
                let spacings: Vec<f64> = roots.windows(2).map(|w| (w[1] - w[0]) / delta).collect();
                if spacings.iter().any(|s| *s < -SORT_SLACK) {
                    return Err(LlsError::InvalidSpectrum("unordered local roots".into()));
                }
                Ok(LocalSpacingRecord { phi, anchor, spacings })
            });
        }
        let spectrum = self.spectrum(index)?;
        Ok(spectrum.local_spacings(phi, max_ell)?.scaled(1.0 / delta))
    }
}

fn checked_spectrum(mut angles: Vec<f64>) -> Result<CircularSpectrum> {
    if angles.windows(2).any(|w| w[1] < w[0] - SORT_SLACK) {
        return Err(LlsError::InvalidSpectrum("eigen-angles out of order".into()));
    }
    angles.sort_by(f64::total_cmp);
    CircularSpectrum::new(angles)
}

/// One CβE(N) spectrum (sample index 0 of the configured seed).
pub fn sample_cbe(config: &EnsembleConfig) -> Result<CircularSpectrum> {
    if config.beta == 0 {
        return arg_err("sample_cbe needs beta in {1, 2, 4}");
    }
    EnsembleSampler::new(*config)?.spectrum(0)
}

fn poisson_circle_from<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CircularSpectrum {
    let mut angles: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
    angles.sort_by(f64::total_cmp);
    CircularSpectrum::new(angles).expect("uniform angles form a valid spectrum")
}

/// `n_levels` independent uniform angles, sorted.
pub fn sample_poisson_circle(n_levels: usize, seed: u64) -> Result<CircularSpectrum> {
    if n_levels == 0 {
        return arg_err("n_levels must be positive");
    }
    Ok(poisson_circle_from(n_levels, &mut sample_rng(seed, 0)))
}

/// Cumulative sums of iid exponential gaps with the given mean, starting at
/// the first gap. Tagged as unfolded when `mean_gap == 1`.
pub fn sample_poisson_line(mean_gap: f64, count: usize, seed: u64) -> Result<LineSpectrum> {
    if !(mean_gap > 0.0 && mean_gap.is_finite()) {
        return arg_err(format!("mean_gap must be positive, got {mean_gap}"));
    }
    if count < 2 {
        return arg_err("count must be at least 2");
    }
    let mut rng = sample_rng(seed, 0);
    let mut x = 0.0;
    let mut levels = Vec::with_capacity(count);
    while levels.len() < count {
        let gap: f64 = Exp1.sample(&mut rng);
        // zero gaps have probability ~1e-300 per draw; skip rather than fail
        if gap > 0.0 {
            x += gap * mean_gap;
            levels.push(x);
        }
    }
    let scale = if mean_gap == 1.0 { Scale::Unfolded } else { Scale::Raw };
    LineSpectrum::new(levels, scale)
}
