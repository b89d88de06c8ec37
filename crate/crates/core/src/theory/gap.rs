//! Gap probabilities `E(0; s)` and nearest-neighbour spacing densities for
//! β = 1, 2, 4 on the unfolded scale, built from the Painlevé table.
//!
//! With `t = 2πs`:
//!
//! * `E2(0; s) = exp I2(t)`
//! * `E1(0; s) = exp(-I1(t)/2) sqrt(E2(0; s))`
//! * `E4(0; s) = cosh(I1(2t)/2) sqrt(E2(0; 2s))`
//!
//! The densities `p = d²E/ds²` are differentiated in closed form from the
//! solution data rather than by finite differences.

use std::f64::consts::PI;

use super::painleve::{PainlevePoint, PainleveTable};
use super::quadrature::composite;
use crate::error::{arg_err, LlsError, Result};

/// Allowed deviation of the density moments from 1.
const MOMENT_TOLERANCE: f64 = 1e-4;

fn check_beta(beta: u8) -> Result<()> {
    match beta {
        1 | 2 | 4 => Ok(()),
        _ => arg_err(format!("gap probabilities need beta in {{1, 2, 4}}, got {beta}")),
    }
}

/// `dt/ds` for the given symmetry class.
fn t_per_s(beta: u8) -> f64 {
    if beta == 4 {
        4.0 * PI
    } else {
        2.0 * PI
    }
}

/// Largest `s` the table covers for this β.
pub fn coverage(table: &PainleveTable, beta: u8) -> f64 {
    table.t_max() / t_per_s(beta)
}

fn point(table: &PainleveTable, beta: u8, s: f64) -> Result<PainlevePoint> {
    check_beta(beta)?;
    if !(s >= 0.0) {
        return arg_err(format!("s must be non-negative, got {s}"));
    }
    if s > coverage(table, beta) {
        return arg_err(format!(
            "s = {s} beyond the tabulated range {} for beta = {beta}",
            coverage(table, beta)
        ));
    }
    table.point(t_per_s(beta) * s)
}

/// `E(0; s)` from an explicit table.
pub fn gap_probability_with(table: &PainleveTable, beta: u8, s: f64) -> Result<f64> {
    let p = point(table, beta, s)?;
    let (u, v) = (0.5 * p.i1, 0.5 * p.i2);
    Ok(match beta {
        1 => (v - u).exp(),
        2 => p.i2.exp(),
        _ => 0.5 * ((v + u).exp() + (v - u).exp()),
    })
}

/// `p(s) = E''(0; s)` from an explicit table.
pub fn spacing_density_with(table: &PainleveTable, beta: u8, s: f64) -> Result<f64> {
    let p = point(table, beta, s)?;
    let (u, v) = (0.5 * p.i1, 0.5 * p.i2);
    // first and second t-derivatives of u = I1/2 and v = I2/2
    let (du, ddu) = (0.5 * p.root, 0.5 * p.d_root);
    let (dv, ddv) = (0.5 * p.sigma_over_t, 0.5 * p.d_sigma_over_t);
    let d2 = match beta {
        1 => (v - u).exp() * ((dv - du).powi(2) + ddv - ddu),
        2 => p.i2.exp() * (p.sigma_over_t.powi(2) + p.d_sigma_over_t),
        _ => {
            let (ep, em) = ((v + u).exp(), (v - u).exp());
            let (ch, sh) = (0.5 * (ep + em), 0.5 * (ep - em));
            ch * (du * du + dv * dv + ddv) + sh * (ddu + 2.0 * du * dv)
        }
    };
    Ok(t_per_s(beta).powi(2) * d2)
}

/// `E(0; s)` from the shared table.
pub fn gap_probability(beta: u8, s: f64) -> Result<f64> {
    gap_probability_with(PainleveTable::shared(), beta, s)
}

/// Zeroth moments `∫p`, `∫s p`, `∫s² p` over the covered range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMoments {
    pub mass: f64,
    pub mean: f64,
    pub second: f64,
}

pub fn density_moments(table: &PainleveTable, beta: u8) -> Result<DensityMoments> {
    check_beta(beta)?;
    let cap = coverage(table, beta);
    let mut err = None;
    let mut acc = [0.0; 3];
    for (k, slot) in acc.iter_mut().enumerate() {
        *slot = composite(0.0, cap, 160, 16, |s| {
            match spacing_density_with(table, beta, s) {
                Ok(p) => p * s.powi(k as i32),
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        });
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok(DensityMoments { mass: acc[0], mean: acc[1], second: acc[2] })
}

fn checked_moments(table: &PainleveTable, beta: u8) -> Result<DensityMoments> {
    let m = density_moments(table, beta)?;
    if (m.mass - 1.0).abs() > MOMENT_TOLERANCE || (m.mean - 1.0).abs() > MOMENT_TOLERANCE {
        return Err(LlsError::Precision(format!(
            "spacing density for beta = {beta} not normalized: mass {}, mean {}",
            m.mass, m.mean
        )));
    }
    Ok(m)
}

fn clip(p: f64, s: f64) -> Result<f64> {
    if p < -1e-8 {
        return Err(LlsError::Precision(format!("density {p:e} negative at s = {s}")));
    }
    Ok(p.max(0.0))
}

/// `p(s)` on a grid, after checking `∫p = ∫s p = 1` to `1e-4`.
pub fn spacing_pdf_with(table: &PainleveTable, beta: u8, grid: &[f64]) -> Result<Vec<f64>> {
    checked_moments(table, beta)?;
    grid.iter()
        .map(|&s| clip(spacing_density_with(table, beta, s)?, s))
        .collect()
}

/// `p0(s) = s p(s)`, the density of the gap straddling a fixed point.
pub fn p0_pdf_with(table: &PainleveTable, beta: u8, grid: &[f64]) -> Result<Vec<f64>> {
    Ok(spacing_pdf_with(table, beta, grid)?
        .into_iter()
        .zip(grid)
        .map(|(p, s)| p * s)
        .collect())
}

pub fn spacing_pdf(beta: u8, grid: &[f64]) -> Result<Vec<f64>> {
    spacing_pdf_with(PainleveTable::shared(), beta, grid)
}

pub fn p0_pdf(beta: u8, grid: &[f64]) -> Result<Vec<f64>> {
    p0_pdf_with(PainleveTable::shared(), beta, grid)
}

/// Mean of `p0`, i.e. the mean zeroth local spacing.
pub fn p0_mean(beta: u8) -> Result<f64> {
    Ok(checked_moments(PainleveTable::shared(), beta)?.second)
}

/// Density of the ordinary spacing, convenient for plotting and fits.
pub fn spacing_density(beta: u8, s: f64) -> Result<f64> {
    spacing_density_with(PainleveTable::shared(), beta, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> &'static PainleveTable {
        PainleveTable::shared()
    }

    #[test]
    fn gap_starts_at_one_and_decreases() {
        for beta in [1u8, 2, 4] {
            assert_eq!(gap_probability(beta, 0.0).unwrap(), 1.0);
            let mut last = 1.0;
            for i in 1..=300 {
                let e = gap_probability(beta, i as f64 * 0.0125).unwrap();
                assert!(e <= last, "beta {beta} at step {i}");
                last = e;
            }
        }
        assert!(gap_probability(2, 3.0).unwrap() < 1e-3);
    }

    #[test]
    fn unit_density_near_origin() {
        for beta in [1u8, 2, 4] {
            let s = 1e-4;
            let e = gap_probability(beta, s).unwrap();
            assert!(((1.0 - e) / s - 1.0).abs() < 1e-3, "beta {beta}");
        }
    }

    #[test]
    fn analytic_density_matches_finite_differences() {
        // sixth-order central stencil for the second derivative
        const W: [f64; 7] = [1.0 / 90.0, -3.0 / 20.0, 1.5, -49.0 / 18.0, 1.5, -3.0 / 20.0, 1.0 / 90.0];
        let h = 1e-2;
        for beta in [1u8, 2, 4] {
            for &s in &[0.3, 0.8, 1.5, 2.5] {
                let fd: f64 = W
                    .iter()
                    .enumerate()
                    .map(|(i, w)| w * gap_probability(beta, s + (i as f64 - 3.0) * h).unwrap())
                    .sum::<f64>()
                    / (h * h);
                let p = spacing_density(beta, s).unwrap();
                assert!((fd - p).abs() < 1e-7, "beta {beta} s {s}: {fd} vs {p}");
            }
        }
    }

    #[test]
    fn densities_normalized() {
        for beta in [1u8, 2, 4] {
            let m = density_moments(table(), beta).unwrap();
            assert!((m.mass - 1.0).abs() < 1e-6, "beta {beta}: mass {}", m.mass);
            assert!((m.mean - 1.0).abs() < 1e-6, "beta {beta}: mean {}", m.mean);
        }
    }

    #[test]
    fn unitary_density_matches_fredholm_second_difference() {
        use crate::theory::fredholm_counts;
        let e = |s: f64| fredholm_counts(s, 0, 60).unwrap()[0];
        let h = 1e-3;
        for &s in &[0.2, 0.6, 0.9, 1.4, 2.2] {
            let fd = (e(s + h) - 2.0 * e(s) + e(s - h)) / (h * h);
            let p = spacing_density(2, s).unwrap();
            assert!((fd - p).abs() < 1e-5, "s {s}: {fd} vs {p}");
        }
    }

    #[test]
    fn out_of_range_is_an_error() {
        assert!(gap_probability(3, 1.0).is_err());
        assert!(gap_probability(2, -1.0).is_err());
        assert!(gap_probability(4, 4.5).is_err());
    }
}
