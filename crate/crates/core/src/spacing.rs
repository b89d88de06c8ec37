//! Spectra and local level spacing extraction.
//!
//! A local spacing record is read off a spectrum relative to a reference
//! point `phi`: spacing 0 is the gap that contains `phi`, spacing `l` is the
//! `l`-th gap after it. On the circle the record wraps with a `2π` carry, so
//! the full record (`L = N - 1`) always sums to `2π`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{arg_err, LlsError, Result, WindowSide};

/// Eigen-angles on `[0, 2π)`, sorted. The mean spacing is `2π / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircularSpectrum {
    angles: Vec<f64>,
}

impl CircularSpectrum {
    /// Wraps already sorted angles. Fails if the list is empty, unsorted or
    /// leaves `[0, 2π)`.
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(LlsError::InvalidSpectrum("no angles".into()));
        }
        if let Some(bad) = angles.iter().find(|a| !(a.is_finite() && **a >= 0.0 && **a < TAU)) {
            return Err(LlsError::InvalidSpectrum(format!("angle {bad} outside [0, 2π)")));
        }
        if let Some(i) = angles.windows(2).position(|w| w[1] < w[0]) {
            return Err(LlsError::InvalidSpectrum(format!(
                "angles not sorted at index {}",
                i + 1
            )));
        }
        Ok(Self { angles })
    }

    /// Reduces arbitrary real angles modulo `2π` and sorts them.
    pub fn from_unsorted(angles: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut v: Vec<f64> = angles.into_iter().map(wrap_angle).collect();
        v.sort_by(f64::total_cmp);
        Self::new(v)
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn n_levels(&self) -> usize {
        self.angles.len()
    }

    pub fn mean_spacing(&self) -> f64 {
        TAU / self.angles.len() as f64
    }

    /// Angle of the `i`-th level on the unrolled circle:
    /// `θ[i mod N] + 2π · (i div N)`.
    #[inline]
    fn unrolled(&self, i: usize) -> f64 {
        let n = self.angles.len();
        self.angles[i % n] + TAU * (i / n) as f64
    }

    /// Index of the eigen-angle immediately to the left of `phi`. If `phi`
    /// precedes every angle, the wrap-around arc owns it and the last index
    /// `N - 1` is returned.
    pub fn locate(&self, phi: f64) -> Result<usize> {
        if !(phi.is_finite() && (0.0..TAU).contains(&phi)) {
            return arg_err(format!("reference point {phi} outside [0, 2π)"));
        }
        let below = self.angles.partition_point(|&a| a < phi);
        if below < self.angles.len() && self.angles[below] == phi {
            return Err(LlsError::DegenerateReference { phi, index: below });
        }
        Ok(if below == 0 { self.angles.len() - 1 } else { below - 1 })
    }

    /// Local spacings `s_0 .. s_L` around `phi`, `1 <= L <= N - 1`.
    pub fn local_spacings(&self, phi: f64, max_ell: usize) -> Result<LocalSpacingRecord> {
        let n = self.angles.len();
        if max_ell == 0 || max_ell >= n {
            return arg_err(format!("L = {max_ell} outside 1..={}", n.saturating_sub(1)));
        }
        let anchor = self.locate(phi)?;
        Ok(self.spacings_from_anchor(phi, anchor, max_ell))
    }

    pub(crate) fn spacings_from_anchor(
        &self,
        phi: f64,
        anchor: usize,
        max_ell: usize,
    ) -> LocalSpacingRecord {
        let spacings = (anchor..=anchor + max_ell)
            .map(|i| self.unrolled(i + 1) - self.unrolled(i))
            .collect();
        LocalSpacingRecord {
            phi,
            anchor,
            spacings,
        }
    }

    /// The `N` cyclic gaps, including the wrap arc `θ_0 + 2π - θ_{N-1}`.
    pub fn consecutive_spacings(&self) -> Result<ConsecutiveSpacings> {
        let n = self.angles.len();
        if n < 2 {
            return arg_err("consecutive spacings need at least two levels");
        }
        let spacings = (0..n).map(|i| self.unrolled(i + 1) - self.unrolled(i)).collect();
        Ok(ConsecutiveSpacings {
            spacings,
            cyclic: true,
        })
    }

    /// Rotates every angle by `offset` (mod `2π`).
    pub fn rotated(&self, offset: f64) -> Self {
        Self::from_unsorted(self.angles.iter().map(|a| a + offset))
            .expect("rotation of a valid spectrum is valid")
    }
}

/// Maps a real angle onto `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Whether a line spectrum is in raw energy units or unfolded to unit density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Raw,
    Unfolded,
}

/// Strictly increasing real levels.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSpectrum {
    levels: Vec<f64>,
    scale: Scale,
}

impl LineSpectrum {
    /// Rejects non-finite values and any zero or negative gap.
    pub fn new(levels: Vec<f64>, scale: Scale) -> Result<Self> {
        if let Some(bad) = levels.iter().find(|x| !x.is_finite()) {
            return Err(LlsError::InvalidSpectrum(format!("non-finite level {bad}")));
        }
        if let Some(i) = levels.windows(2).position(|w| w[1] <= w[0]) {
            return Err(LlsError::InvalidSpectrum(format!(
                "levels not strictly increasing at index {} ({} -> {})",
                i + 1,
                levels[i],
                levels[i + 1]
            )));
        }
        Ok(Self { levels, scale })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Mean gap over the whole list.
    pub fn mean_gap(&self) -> Option<f64> {
        let n = self.levels.len();
        (n >= 2).then(|| (self.levels[n - 1] - self.levels[0]) / (n - 1) as f64)
    }

    /// Local spacings around `phi`: `anchor` is the last level below `phi`
    /// and spacing `l` is `levels[anchor + l + 1] - levels[anchor + l]`.
    pub fn local_spacings(&self, phi: f64, max_ell: usize) -> Result<LocalSpacingRecord> {
        let below = self.levels.partition_point(|&x| x < phi);
        if below < self.levels.len() && self.levels[below] == phi {
            return Err(LlsError::DegenerateReference { phi, index: below });
        }
        if below == 0 {
            return Err(LlsError::WindowUnderflow {
                side: WindowSide::Below,
                needed: 1,
                found: 0,
            });
        }
        let above = self.levels.len() - below;
        if above < max_ell + 1 {
            return Err(LlsError::WindowUnderflow {
                side: WindowSide::Above,
                needed: max_ell + 1,
                found: above,
            });
        }
        let anchor = below - 1;
        let spacings = self.levels[anchor..=anchor + max_ell + 1]
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect();
        Ok(LocalSpacingRecord {
            phi,
            anchor,
            spacings,
        })
    }

    /// Applies a monotone map to every level. The result must stay strictly
    /// increasing.
    pub fn map_levels(&self, scale: Scale, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.levels.iter().map(|&x| f(x)).collect(), scale)
    }
}

/// Spacings read off a spectrum relative to a fixed reference point.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSpacingRecord {
    pub phi: f64,
    pub anchor: usize,
    pub spacings: Vec<f64>,
}

impl LocalSpacingRecord {
    pub fn max_ell(&self) -> usize {
        self.spacings.len() - 1
    }

    /// Multiplies every spacing by `factor` (unit conversion).
    pub fn scaled(mut self, factor: f64) -> Self {
        self.spacings.iter_mut().for_each(|s| *s *= factor);
        self
    }
}

/// Gaps between consecutive levels. Cyclic sets come from a circle and
/// include the wrap arc.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsecutiveSpacings {
    pub spacings: Vec<f64>,
    pub cyclic: bool,
}

impl ConsecutiveSpacings {
    pub fn len(&self) -> usize {
        self.spacings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spacings.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.spacings.iter().sum::<f64>() / self.spacings.len() as f64
    }

    /// Per-spectrum size-biased estimator of the mean `ell`-th local spacing:
    /// `(1/Δ) (1/N) Σ_k s_k s_{k+ell mod N}` with `Δ = 2π/N`. Averaging it
    /// over spectra converges to the mean local spacing at a fixed reference
    /// point. The result is in the same units as the spacings.
    pub fn size_biased_mean(&self, ell: usize) -> Result<f64> {
        let n = self.spacings.len();
        if !self.cyclic {
            return arg_err("size-biased estimator needs cyclic spacings");
        }
        if ell >= n {
            return arg_err(format!("ell = {ell} outside 0..{n}"));
        }
        let delta = TAU / n as f64;
        let sum: f64 = (0..n)
            .map(|k| self.spacings[k] * self.spacings[(k + ell) % n])
            .sum();
        Ok(sum / (n as f64 * delta))
    }

    /// Mean of `s_k s_{k+lag}` over the cyclic set (used for the direct
    /// autocovariance estimate).
    pub fn lagged_product_mean(&self, lag: usize) -> f64 {
        let n = self.spacings.len();
        (0..n)
            .map(|k| self.spacings[k] * self.spacings[(k + lag) % n])
            .sum::<f64>()
            / n as f64
    }
}

/// `|LHS - RHS|` for the generating-function identity of local spacings at
/// reference point 0:
///
/// `∫_0^{2π} z^{n(ϑ)} dϑ = z^N s_0 + Σ_{l=1}^{N-1} z^l s_l`
///
/// where `n(ϑ)` is the 1-based index of the eigen-angle left of `ϑ` (`N` on
/// the wrap arc). The left side is summed arc by arc using [`locate`]; the
/// right side comes from the local spacing record, so the residual checks the
/// two against each other.
///
/// [`locate`]: CircularSpectrum::locate
pub fn generating_identity_residual(spectrum: &CircularSpectrum, z: Complex64) -> Result<f64> {
    let n = spectrum.n_levels();
    let angles = spectrum.angles();

    // Arc boundaries: 0, θ_0, ..., θ_{N-1}, 2π. n(ϑ) is constant on each arc.
    let mut lhs = Complex64::new(0.0, 0.0);
    let mut left = 0.0;
    for &right in angles.iter().chain(std::iter::once(&TAU)) {
        let width = right - left;
        if width > 0.0 {
            let mid = 0.5 * (left + right);
            let idx = spectrum.locate(mid)? + 1;
            lhs += z.powu(idx as u32) * width;
        }
        left = right;
    }

    // Reference point 0 sits on the wrap arc, anchor N - 1. When θ_0 = 0 the
    // point is approached from the left, which is the same arc.
    let record = if angles[0] > 0.0 && n > 1 {
        spectrum.local_spacings(0.0, n - 1)?
    } else {
        spectrum.spacings_from_anchor(0.0, n - 1, n - 1)
    };
    let mut rhs = z.powu(n as u32) * record.spacings[0];
    for (ell, s) in record.spacings.iter().enumerate().skip(1) {
        rhs += z.powu(ell as u32) * *s;
    }
    Ok((lhs - rhs).norm())
}
