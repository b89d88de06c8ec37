//! Circular β-ensembles from random Verblunsky coefficients.
//!
//! For CβE(N) the coefficients `α_0 .. α_{N-2}` are independent and
//! rotation invariant with `|α_k|² ~ Beta(1, β(N-k-1)/2)`, and `α_{N-1}` is
//! uniform on the unit circle. The eigenvalues of the associated CMV matrix
//! are the zeros of the paraorthogonal polynomial
//! `Φ_N(z) = z Φ_{N-1}(z) - conj(α_{N-1}) Φ*_{N-1}(z)`.
//!
//! Rather than diagonalizing the CMV matrix, eigen-angles are found from the
//! Szegő recursion written for the unimodular ratio
//! `b_k = z Φ_k / Φ*_k`:
//!
//! `b_0 = z`, `b_{k+1} = z (b_k - conj α_k) / (1 - α_k b_k)`.
//!
//! With `b_k = e^{iψ_k}` the phase obeys
//! `ψ_{k+1} = θ + ψ_k + 2 arg(1 - conj(α_k) e^{-iψ_k})`, where the argument
//! stays in `(-π/2, π/2)`, so `ψ_{N-1}(θ)` is a continuous lift. It is
//! strictly increasing, `ψ_{N-1}(θ + 2π) = ψ_{N-1}(θ) + 2πN`, and the
//! eigen-angles solve `ψ_{N-1}(θ) = arg conj(α_{N-1}) + 2πj`. Each root is
//! bracketed by its predecessor, which makes a safeguarded Newton iteration
//! reliable. The dense CMV matrix is kept for cross-checks.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{LlsError, Result};
use crate::spacing::wrap_angle;

const MAX_NEWTON: usize = 200;

/// Verblunsky coefficients of a finite CMV matrix; the last one is unimodular.
#[derive(Debug, Clone, PartialEq)]
pub struct Verblunsky {
    alphas: Vec<Complex64>,
}

impl Verblunsky {
    pub fn new(alphas: Vec<Complex64>) -> Result<Self> {
        let n = alphas.len();
        if n == 0 {
            return Err(LlsError::Argument("need at least one coefficient".into()));
        }
        if alphas[..n - 1].iter().any(|a| !(a.norm() < 1.0)) {
            return Err(LlsError::Argument("inner coefficients must lie in the open unit disk".into()));
        }
        if (alphas[n - 1].norm() - 1.0).abs() > 1e-12 {
            return Err(LlsError::Argument("last coefficient must be unimodular".into()));
        }
        Ok(Self { alphas })
    }

    /// Draws the CβE(N) coefficients.
    pub fn sample_cbe<R: Rng + ?Sized>(beta: f64, n: usize, rng: &mut R) -> Self {
        let mut alphas = Vec::with_capacity(n);
        for k in 0..n.saturating_sub(1) {
            let shape = beta * (n - k - 1) as f64 / 2.0;
            // inverse CDF of Beta(1, shape): 1 - (1 - x)^shape
            let u: f64 = rng.random();
            let r2 = 1.0 - u.powf(1.0 / shape);
            let phase: f64 = rng.random::<f64>() * TAU;
            alphas.push(Complex64::from_polar(r2.sqrt(), phase));
        }
        let phase: f64 = rng.random::<f64>() * TAU;
        alphas.push(Complex64::from_polar(1.0, phase));
        Self { alphas }
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    /// Target offset: eigen-angles satisfy `ψ(θ) = offset + 2πj`.
    fn offset(&self) -> f64 {
        self.alphas[self.alphas.len() - 1].conj().arg()
    }

    /// Lifted phase `ψ_{N-1}(θ)` and its derivative in `θ`.
    pub fn phase(&self, theta: f64) -> (f64, f64) {
        let z = Complex64::from_polar(1.0, theta);
        let mut u = z;
        let mut psi = theta;
        let mut dpsi = 1.0;
        let inner = &self.alphas[..self.alphas.len() - 1];
        for (k, a) in inner.iter().enumerate() {
            let w = Complex64::new(1.0, 0.0) - a.conj() * u.conj();
            let norm2 = w.norm_sqr();
            psi += theta + 2.0 * w.im.atan2(w.re);
            dpsi = 1.0 + dpsi * (2.0 * w.re / norm2 - 1.0);
            u = z * u * w * w / norm2;
            if k % 16 == 15 {
                u /= u.norm();
            }
        }
        (psi, dpsi)
    }

    /// Solves `ψ(θ) = target` inside `(lo, hi)` given the values at `start`,
    /// which must be one of the bracket ends.
    fn solve_level(&self, target: f64, mut lo: f64, mut hi: f64, start: (f64, f64, f64)) -> Result<f64> {
        let (x0, psi0, dpsi0) = start;
        let mut x = x0 - (psi0 - target) / dpsi0;
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let n = self.alphas.len() as f64;
        for _ in 0..MAX_NEWTON {
            let (psi, dpsi) = self.phase(x);
            let f = psi - target;
            // The recursion accumulates rounding of order eps·(|ψ| + N), so a
            // residual inside that band cannot be improved upon.
            if f.abs() <= 16.0 * f64::EPSILON * (psi.abs() + n) {
                return Ok(x);
            }
            if f < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let step = f / dpsi;
            let mut next = x - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            // Inside a steep jump a tiny step says nothing about the distance
            // to the root, so apart from the residual only the bracket counts.
            if hi - lo <= 2.0 * f64::EPSILON * x.abs().max(1.0) {
                return Ok(next);
            }
            x = next;
        }
        Err(LlsError::Solver {
            location: x,
            message: "phase root did not converge".into(),
        })
    }

    /// Smallest level index whose root lies in `[0, 2π)`.
    fn first_level(&self) -> (i64, f64, f64) {
        let (psi, dpsi) = self.phase(0.0);
        (((psi - self.offset()) / TAU).ceil() as i64, psi, dpsi)
    }

    /// All `N` eigen-angles on `[0, 2π)`, sorted.
    pub fn eigenangles(&self) -> Result<Vec<f64>> {
        let n = self.alphas.len();
        let c = self.offset();
        let (j_first, psi0, dpsi0) = self.first_level();
        let mut out = Vec::with_capacity(n);
        let mut start = (0.0, psi0, dpsi0);
        let mut lo = 0.0;
        for j in j_first..j_first + n as i64 {
            let target = c + TAU * j as f64;
            let root = if start.1 == target {
                start.0
            } else {
                self.solve_level(target, lo, lo + TAU, start)?
            };
            let (psi, dpsi) = self.phase(root);
            out.push(root);
            start = (root, psi, dpsi);
            lo = root;
        }
        let mut angles: Vec<f64> = out.into_iter().map(wrap_angle).collect();
        angles.sort_by(f64::total_cmp);
        Ok(angles)
    }

    /// Eigen-angles around `phi` only: the root left of `phi` followed by the
    /// next `count - 1` roots, on the unrolled line (the first lies in
    /// `[phi - 2π, phi)`). Also returns the index of the first root in the
    /// sorted spectrum on `[0, 2π)`.
    pub fn angles_around(&self, phi: f64, count: usize) -> Result<(usize, Vec<f64>)> {
        let n = self.alphas.len() as i64;
        let c = self.offset();
        let (psi_phi, dpsi_phi) = self.phase(phi);
        let j0 = ((psi_phi - c) / TAU).floor() as i64;
        let target0 = c + TAU * j0 as f64;
        if target0 == psi_phi {
            return Err(LlsError::DegenerateReference { phi, index: 0 });
        }
        let mut roots = Vec::with_capacity(count);
        let first = self.solve_level(target0, phi - TAU, phi, (phi, psi_phi, dpsi_phi))?;
        roots.push(first);
        let (mut psi, mut dpsi) = self.phase(first);
        for j in j0 + 1..j0 + count as i64 {
            let prev = *roots.last().expect("non-empty");
            let target = c + TAU * j as f64;
            let root = self.solve_level(target, prev, prev + TAU, (prev, psi, dpsi))?;
            (psi, dpsi) = self.phase(root);
            roots.push(root);
        }
        // Level j sits at sorted index (j - j_first) mod N, shifted if the
        // root was unrolled below 0.
        let (j_first, _, _) = self.first_level();
        let anchor = (j0 - j_first).rem_euclid(n) as usize;
        Ok((anchor, roots))
    }

    /// Dense CMV matrix `C = L M` with `L = Ξ_0 ⊕ Ξ_2 ⊕ …`,
    /// `M = 1 ⊕ Ξ_1 ⊕ Ξ_3 ⊕ …`, `Ξ_k = [[conj α_k, ρ_k], [ρ_k, -α_k]]` and a
    /// trailing `1 × 1` block `conj α_{N-1}`.
    pub fn cmv_matrix(&self) -> DMatrix<Complex64> {
        let n = self.alphas.len();
        let mut l = DMatrix::<Complex64>::zeros(n, n);
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let target = if k % 2 == 0 { &mut l } else { &mut m };
            let a = self.alphas[k];
            if k + 1 < n {
                let rho = Complex64::new((1.0 - a.norm_sqr()).sqrt(), 0.0);
                target[(k, k)] = a.conj();
                target[(k, k + 1)] = rho;
                target[(k + 1, k)] = rho;
                target[(k + 1, k + 1)] = -a;
            } else {
                target[(k, k)] = a.conj();
            }
        }
        l * m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitary_eigenangles;
    use crate::rng::sample_rng;

    fn close_cyclic(a: f64, b: f64, tol: f64) -> bool {
        let d = (a - b).abs();
        d.min(TAU - d) < tol
    }

    #[test]
    fn phase_roots_match_dense_cmv() {
        for (beta, n) in [(1.0, 7), (2.0, 8), (4.0, 9), (2.0, 33), (1.0, 64)] {
            for idx in 0..10 {
                let mut rng = sample_rng(17, idx);
                let v = Verblunsky::sample_cbe(beta, n, &mut rng);
                let fast = v.eigenangles().unwrap();
                let dense = unitary_eigenangles(&v.cmv_matrix()).unwrap();
                assert_eq!(fast.len(), n);
                for (a, b) in fast.iter().zip(&dense) {
                    assert!(close_cyclic(*a, *b, 1e-10), "β={beta} N={n}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn cmv_matrix_is_unitary() {
        let mut rng = sample_rng(1, 0);
        let v = Verblunsky::sample_cbe(2.0, 12, &mut rng);
        let c = v.cmv_matrix();
        let err = (&c * c.adjoint() - DMatrix::identity(12, 12)).map(|z| z.norm()).max();
        assert!(err < 1e-13);
    }

    #[test]
    fn single_coefficient_gives_conjugate() {
        let a = Complex64::from_polar(1.0, 0.7);
        let v = Verblunsky::new(vec![a]).unwrap();
        let ev = v.eigenangles().unwrap();
        assert!(close_cyclic(ev[0], wrap_angle(-0.7), 1e-14));
    }

    #[test]
    fn phase_is_quasi_periodic_and_increasing() {
        let mut rng = sample_rng(2, 0);
        let v = Verblunsky::sample_cbe(1.0, 20, &mut rng);
        let (p0, _) = v.phase(0.3);
        let (p1, _) = v.phase(0.3 + TAU);
        assert!((p1 - p0 - TAU * 20.0).abs() < 1e-10);
        let mut last = f64::NEG_INFINITY;
        for i in 0..2000 {
            let (p, d) = v.phase(i as f64 * TAU / 2000.0);
            assert!(p > last && d > 0.0);
            last = p;
        }
    }

    #[test]
    fn phase_derivative_matches_finite_difference() {
        let mut rng = sample_rng(3, 0);
        let v = Verblunsky::sample_cbe(4.0, 16, &mut rng);
        for &t in &[0.1, 1.7, 4.0] {
            let h = 1e-6;
            let fd = (v.phase(t + h).0 - v.phase(t - h).0) / (2.0 * h);
            let d = v.phase(t).1;
            assert!((fd - d).abs() < 1e-5 * d.abs(), "{fd} vs {d}");
        }
    }

    #[test]
    fn local_roots_match_full_spectrum() {
        for idx in 0..50 {
            let mut rng = sample_rng(23, idx);
            let v = Verblunsky::sample_cbe(2.0, 32, &mut rng);
            let full = v.eigenangles().unwrap();
            let phi = (idx as f64 * 0.37) % TAU;
            let (anchor, local) = v.angles_around(phi, 6).unwrap();
            for (i, r) in local.iter().enumerate() {
                assert!(close_cyclic(wrap_angle(*r), full[(anchor + i) % 32], 1e-12));
            }
            assert!(local[0] < phi && local[1] > phi);
        }
    }

    #[test]
    fn rejects_bad_coefficients() {
        assert!(Verblunsky::new(vec![]).is_err());
        assert!(Verblunsky::new(vec![Complex64::new(0.5, 0.0)]).is_err());
        assert!(Verblunsky::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).is_err());
    }
}
