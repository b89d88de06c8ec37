//! Dense eigenvalue helpers.
//!
//! Unitary spectra are obtained through the Cayley transform
//! `H = -i (U - ω) (U + ω)^{-1}` with `|ω| = 1`, which is Hermitian, and a
//! Hermitian eigensolve. The eigen-angles follow from `θ = arg ω + 2 atan λ`.
//! The transform is ill-conditioned when an eigenvalue of `U` sits near
//! `-ω`, so the pivot is re-chosen in the middle of the widest gap of a first
//! pass whenever that happens.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{LlsError, Result};
use crate::spacing::wrap_angle;

/// Distance from `-ω` below which the first pass is redone.
const PIVOT_CLEARANCE: f64 = 1e-2;

/// Sorted eigenvalues of a Hermitian matrix. Only the lower triangle is read.
pub fn hermitian_eigenvalues(h: DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigen-angles of a unitary matrix on `[0, 2π)`, sorted.
pub fn unitary_eigenangles(u: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if !u.is_square() {
        return Err(LlsError::Argument("matrix is not square".into()));
    }
    let first = cayley_pass(u, PI)?;
    let nearest = first
        .iter()
        .map(|&a| (a - PI).abs())
        .fold(f64::INFINITY, f64::min);
    if nearest > PIVOT_CLEARANCE || first.len() < 2 {
        return Ok(first);
    }
    // Put the pivot in the middle of the widest gap.
    let n = first.len();
    let (mut best, mut mid) = (0.0, PI);
    for i in 0..n {
        let lo = first[i];
        let hi = if i + 1 < n { first[i + 1] } else { first[0] + TAU };
        if hi - lo > best {
            best = hi - lo;
            mid = 0.5 * (lo + hi);
        }
    }
    cayley_pass(u, wrap_angle(mid))
}

/// One Cayley transform with pivot `-ω = e^{i pivot}`.
fn cayley_pass(u: &DMatrix<Complex64>, pivot: f64) -> Result<Vec<f64>> {
    let n = u.nrows();
    let omega = Complex64::from_polar(1.0, pivot + PI);
    let id = DMatrix::<Complex64>::identity(n, n);
    let plus = u + &id * omega;
    let minus = u - &id * omega;
    // (U - ω) and (U + ω)^{-1} commute, so X = (U + ω)^{-1} (U - ω).
    let x = plus.lu().solve(&minus).ok_or_else(|| LlsError::Solver {
        location: pivot,
        message: "singular Cayley pivot".into(),
    })? * Complex64::new(0.0, -1.0);
    let h = (&x + x.adjoint()) * Complex64::new(0.5, 0.0);
    let mut angles: Vec<f64> = hermitian_eigenvalues(h)
        .into_iter()
        .map(|lam| wrap_angle(omega.arg() + 2.0 * lam.atan()))
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}
