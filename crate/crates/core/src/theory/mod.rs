//! Exact reference curves: gap probabilities, spacing densities, counting
//! probabilities and theory means.

mod constants;
mod fredholm;
mod gap;
mod painleve;
pub mod quadrature;

pub use constants::*;
pub use fredholm::{default_quad_order, fredholm_counts, kernel_eigenvalues, mean_lls_theory};
pub use gap::{
    coverage, density_moments, gap_probability, gap_probability_with, p0_mean, p0_pdf, p0_pdf_with,
    spacing_density, spacing_density_with, spacing_pdf, spacing_pdf_with, DensityMoments,
};
pub use painleve::{painleve_sigma0, PainlevePoint, PainleveTable, DEFAULT_TOLERANCE, DEFAULT_T_MAX};

/// Poisson counting probability `λ^ℓ e^{-λ} / ℓ!`.
pub fn poisson_counts(lambda: f64, ell_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(ell_max + 1);
    let mut term = (-lambda).exp();
    for l in 0..=ell_max {
        if l > 0 {
            term *= lambda / l as f64;
        }
        out.push(term);
    }
    out
}

/// Densities of the local r-ratios for Poisson levels: `2/(1+r)³` for
/// `ℓ = 0` and `1/(1+r)²` beyond.
pub fn poisson_r_density(ell: usize, r: f64) -> f64 {
    if ell == 0 {
        2.0 / (1.0 + r).powi(3)
    } else {
        1.0 / (1.0 + r).powi(2)
    }
}

/// Distribution functions matching [`poisson_r_density`].
pub fn poisson_r_cdf(ell: usize, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    if ell == 0 {
        1.0 - 1.0 / (1.0 + r).powi(2)
    } else {
        r / (1.0 + r)
    }
}
