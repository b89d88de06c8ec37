//! Counting probabilities `E(ℓ; λ)` of the sine process on an interval of
//! length `λ`, from a Nyström discretization of the sine kernel.
//!
//! With `μ_i` the eigenvalues of the discretized kernel,
//! `Σ_ℓ E(ℓ; λ) z^ℓ = Π_i (1 - μ_i + z μ_i)`, so the probabilities are the
//! coefficients of a product of linear factors, accumulated one factor at a
//! time (every intermediate is a probability vector, so nothing cancels).

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::quadrature::{adaptive, gauss_legendre_on};
use crate::error::{arg_err, LlsError, Result};

pub const MAX_LAMBDA: f64 = 20.0;
pub const MIN_QUAD_ORDER: usize = 40;
/// Eigenvalues beyond `[0, 1]` by more than this signal a broken discretization.
const SPECTRUM_SLACK: f64 = 1e-10;

fn sinc_kernel(x: f64, y: f64) -> f64 {
    let d = PI * (x - y);
    if d.abs() < 1e-8 {
        1.0 - d * d / 6.0
    } else {
        d.sin() / d
    }
}

/// Quadrature order that resolves the kernel on `[0, λ]` to machine precision.
pub fn default_quad_order(lambda: f64) -> usize {
    MIN_QUAD_ORDER.max((2.0 * lambda).ceil() as usize + 30)
}

/// Eigenvalues of the symmetrized Nyström matrix, clamped to `[0, 1]`.
pub fn kernel_eigenvalues(lambda: f64, quad_order: usize) -> Result<Vec<f64>> {
    let (x, w) = gauss_legendre_on(quad_order, 0.0, lambda);
    let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let m = DMatrix::from_fn(quad_order, quad_order, |i, j| sw[i] * sinc_kernel(x[i], x[j]) * sw[j]);
    let mut mu: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    for v in &mut mu {
        if *v < -SPECTRUM_SLACK || *v > 1.0 + SPECTRUM_SLACK {
            return Err(LlsError::Precision(format!(
                "kernel eigenvalue {v} outside [0, 1]; increase the quadrature order"
            )));
        }
        // values within rounding of 1 are kept as 1: the factor 1 - μ is then
        // below double resolution anyway and E stays absolutely accurate
        *v = v.clamp(0.0, 1.0);
    }
    mu.sort_by(f64::total_cmp);
    Ok(mu)
}

/// `E(ℓ; λ)` for `ℓ = 0..=ell_max`.
pub fn fredholm_counts(lambda: f64, ell_max: usize, quad_order: usize) -> Result<Vec<f64>> {
    if !(0.0..=MAX_LAMBDA).contains(&lambda) {
        return arg_err(format!("lambda must lie in [0, {MAX_LAMBDA}], got {lambda}"));
    }
    if quad_order < MIN_QUAD_ORDER {
        return arg_err(format!("quadrature order must be at least {MIN_QUAD_ORDER}"));
    }
    let mut e = vec![0.0; ell_max + 1];
    e[0] = 1.0;
    if lambda == 0.0 {
        return Ok(e);
    }
    for mu in kernel_eigenvalues(lambda, quad_order)? {
        for l in (0..=ell_max).rev() {
            let carry = if l > 0 { e[l - 1] * mu } else { 0.0 };
            e[l] = e[l] * (1.0 - mu) + carry;
        }
    }
    Ok(e)
}

/// Mean `ℓ`-th local spacing in units of the mean spacing.
///
/// `β = 0` is the Poisson value (2 for `ℓ = 0`, 1 otherwise). For `β = 2`
/// the counting probability is integrated over `λ ∈ [0, ℓ + 12]`; beyond
/// that it is below `1e-10`.
pub fn mean_lls_theory(beta: u8, ell: usize) -> Result<f64> {
    let factor = if ell == 0 { 2.0 } else { 1.0 };
    match beta {
        0 => Ok(factor),
        2 => {
            if ell > 8 {
                return arg_err(format!("ell must be at most 8, got {ell}"));
            }
            let upper = ell as f64 + 12.0;
            let value = adaptive(0.0, upper, 1e-10, |lam| {
                match fredholm_counts(lam, ell, default_quad_order(lam)) {
                    Ok(e) => e[ell],
                    Err(e) => {
                        log::warn!("counting probability failed at {lam}: {e}");
                        f64::NAN
                    }
                }
            });
            match value {
                Some(v) if v.is_finite() => Ok(factor * v),
                _ => Err(LlsError::Solver {
                    location: upper,
                    message: "quadrature of the counting probability did not converge".into(),
                }),
            }
        }
        _ => arg_err(format!("theory means are computed for beta 0 and 2 only, got {beta}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_interval_expansion() {
        let lam = 1e-3;
        let e = fredholm_counts(lam, 2, 40).unwrap();
        assert!((e[0] - (1.0 - lam)).abs() < lam * lam);
        assert!((e[1] - lam).abs() < lam * lam);
    }

    #[test]
    fn probabilities_and_intensity() {
        for lam in [0.5, 1.0, 2.0, 5.0] {
            let n = default_quad_order(lam);
            let e = fredholm_counts(lam, n, n).unwrap();
            let total: f64 = e.iter().sum();
            let mean: f64 = e.iter().enumerate().map(|(l, p)| l as f64 * p).sum();
            assert!((total - 1.0).abs() < 1e-10);
            assert!((mean - lam).abs() < 1e-8);
        }
    }

    #[test]
    fn converged_in_quadrature_order() {
        for lam in [3.0, 12.0, 20.0] {
            let a = fredholm_counts(lam, 8, default_quad_order(lam)).unwrap();
            let b = fredholm_counts(lam, 8, default_quad_order(lam) + 40).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-13, "λ={lam}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn poisson_means() {
        assert_eq!(mean_lls_theory(0, 0).unwrap(), 2.0);
        assert_eq!(mean_lls_theory(0, 3).unwrap(), 1.0);
    }

    #[test]
    fn argument_checks() {
        assert!(fredholm_counts(21.0, 2, 60).is_err());
        assert!(fredholm_counts(2.0, 2, 20).is_err());
        assert!(mean_lls_theory(1, 0).is_err());
        assert!(mean_lls_theory(2, 9).is_err());
    }
}
