//! Dirichlet spectra of rectangular billiards, `E = π²(m²/a² + n²/b²)`.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, LlsError, Result};
use crate::rng::sample_rng;
use crate::spacing::{LineSpectrum, Scale};

/// Raw windows must hold at least this many levels.
pub const MIN_WINDOW_LEVELS: usize = 1000;

/// Largest continued-fraction denominator treated as "rational".
const RATIONAL_DENOMINATOR: u64 = 1000;
const RATIONAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilliardConfig {
    pub area: f64,
    /// Side ratio `a/b`.
    pub aspect_ratio: f64,
    /// Centre of the energy window (raw axis).
    pub energy_center: f64,
    pub window_halfwidth: f64,
}

impl BilliardConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("area", self.area),
            ("aspect_ratio", self.aspect_ratio),
            ("energy_center", self.energy_center),
            ("window_halfwidth", self.window_halfwidth),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return arg_err(format!("{name} must be positive and finite, got {v}"));
            }
        }
        Ok(())
    }

    /// Side lengths `(a, b)` with `a b = area` and `a/b = aspect_ratio`.
    pub fn sides(&self) -> (f64, f64) {
        ((self.area * self.aspect_ratio).sqrt(), (self.area / self.aspect_ratio).sqrt())
    }

    pub fn perimeter(&self) -> f64 {
        let (a, b) = self.sides();
        2.0 * (a + b)
    }

    /// Smooth level count `(A/4π)E - (P/4π)√E + 1/4`.
    pub fn weyl_count(&self, energy: f64) -> f64 {
        (self.area * energy - self.perimeter() * energy.max(0.0).sqrt()) / (4.0 * PI) + 0.25
    }

    pub fn window(&self) -> (f64, f64) {
        ((self.energy_center - self.window_halfwidth).max(0.0), self.energy_center + self.window_halfwidth)
    }
}

/// A small-denominator rational `p/q` within the tolerance of `x`, if any.
pub fn rational_approximation(x: f64) -> Option<(u64, u64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e12 {
            break;
        }
        let a = a as u64;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > RATIONAL_DENOMINATOR {
            break;
        }
        if (x - p2 as f64 / q2 as f64).abs() <= RATIONAL_TOLERANCE * x.abs().max(1.0) {
            return Some((p2, q2));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a as f64;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// Every mode `(E, m, n)` with `E` in `[e_lo, e_hi]`, unsorted.
pub fn billiard_modes(config: &BilliardConfig) -> Result<Vec<(f64, u64, u64)>> {
    config.validate()?;
    let (a, b) = config.sides();
    let (e_lo, e_hi) = config.window();
    let (a2, b2) = (a * a, b * b);
    let (ka, kb) = (PI * PI / a2, PI * PI / b2);
    let mut out = Vec::new();
    let m_max = (e_hi / ka).sqrt().floor() as u64 + 1;
    for m in 1..=m_max {
        let em = ka * (m * m) as f64;
        if em > e_hi {
            break;
        }
        // n range from the window, padded by one and filtered exactly below
        let n_lo = (((e_lo - em) / kb).max(0.0).sqrt().floor() as u64).saturating_sub(1).max(1);
        let n_hi = ((e_hi - em) / kb).sqrt().floor() as u64 + 1;
        for n in n_lo..=n_hi {
            let e = PI * PI * ((m * m) as f64 / a2 + (n * n) as f64 / b2);
            if e >= e_lo && e <= e_hi {
                out.push((e, m, n));
            }
        }
    }
    Ok(out)
}

/// Sorted raw levels in the window. Warns when the squared aspect ratio looks
/// rational; errors when the window holds fewer than [`MIN_WINDOW_LEVELS`]
/// levels or when levels coincide.
pub fn billiard_levels(config: &BilliardConfig) -> Result<LineSpectrum> {
    let h2 = config.aspect_ratio * config.aspect_ratio;
    if let Some((p, q)) = rational_approximation(h2) {
        log::warn!("squared aspect ratio {h2} is close to {p}/{q}: expect systematic degeneracies");
    }
    let mut levels: Vec<f64> = billiard_modes(config)?.into_iter().map(|(e, _, _)| e).collect();
    if levels.len() < MIN_WINDOW_LEVELS {
        return Err(LlsError::InsufficientLevels { found: levels.len(), needed: MIN_WINDOW_LEVELS });
    }
    levels.sort_by(f64::total_cmp);
    LineSpectrum::new(levels, Scale::Raw)
}

/// Maps raw billiard levels through the smooth count.
pub fn weyl_unfold(spectrum: &LineSpectrum, config: &BilliardConfig) -> Result<LineSpectrum> {
    spectrum.map_levels(Scale::Unfolded, |e| config.weyl_count(e))
}

/// Billiards of fixed area with aspect ratios drawn uniformly from a range.
/// Each draw yields the unfolded window and the reference point `N̄(φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilliardFamily {
    pub area: f64,
    pub aspect_range: (f64, f64),
    pub energy_center: f64,
    pub window_halfwidth: f64,
    pub seed: u64,
}

impl BilliardFamily {
    pub fn config(&self, draw: u64) -> BilliardConfig {
        let (lo, hi) = self.aspect_range;
        let h = lo + (hi - lo) * sample_rng(self.seed, draw).random::<f64>();
        BilliardConfig {
            area: self.area,
            aspect_ratio: h,
            energy_center: self.energy_center,
            window_halfwidth: self.window_halfwidth,
        }
    }

    pub fn draw(&self, draw: u64) -> Result<(LineSpectrum, f64)> {
        let config = self.config(draw);
        let raw = billiard_levels(&config)?;
        Ok((weyl_unfold(&raw, &config)?, config.weyl_count(self.energy_center)))
    }
}
