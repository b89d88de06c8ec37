//! The σ-form Painlevé V transcendent behind the sine-kernel gap
//! probabilities,
//!
//! `(t σ'')² + (t σ' - σ)(t σ' - σ + 4 σ'²) = 0`, `σ(t) = -t/2π - (t/2π)² + O(t³)`.
//!
//! Near the origin σ is a power series whose coefficients are generated order
//! by order from the equation itself. From `t0` on, the second-order form
//! `σ'' = -sqrt(-(tσ' - σ)(tσ' - σ + 4σ'²)) / t` is integrated with an
//! adaptive Dormand–Prince 5(4) scheme, carrying the two integrals every gap
//! probability needs:
//!
//! * `I2(t) = ∫₀ᵗ σ(u)/u du`
//! * `I1(t) = ∫₀ᵗ sqrt(-(σ/u)'(u)) du`
//!
//! Values between stored steps are obtained by integrating again from the
//! nearest stored step, so evaluation keeps the integrator's accuracy.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{LlsError, Result};

/// Degree of the series used below `T0`.
const SERIES_DEGREE: usize = 24;
const T0: f64 = 1e-2;
/// Default table used by the free functions.
pub const DEFAULT_T_MAX: f64 = 50.0;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

type State = [f64; 4];

/// Quantities along the solution that the gap formulas are built from.
#[derive(Debug, Clone, Copy)]
pub struct PainlevePoint {
    pub t: f64,
    pub sigma: f64,
    /// `σ(t)/t`
    pub sigma_over_t: f64,
    /// `(σ/t)' = (tσ' - σ)/t²`
    pub d_sigma_over_t: f64,
    /// `sqrt(-(σ/t)')`, the integrand of `I1`
    pub root: f64,
    /// derivative of `root`
    pub d_root: f64,
    pub i1: f64,
    pub i2: f64,
}

#[derive(Debug, Clone)]
pub struct PainleveTable {
    coeffs: Vec<f64>,
    root_coeffs: Vec<f64>,
    t_max: f64,
    tolerance: f64,
    nodes: Vec<(f64, State)>,
}

/// Builds `σ₀` on `(0, t_max]`.
pub fn painleve_sigma0(t_max: f64, tolerance: f64) -> Result<PainleveTable> {
    PainleveTable::new(t_max, tolerance)
}

impl PainleveTable {
    pub fn new(t_max: f64, tolerance: f64) -> Result<Self> {
        if !(t_max > T0 && t_max <= 50.0) {
            return Err(LlsError::Argument(format!("t_max must lie in ({T0}, 50], got {t_max}")));
        }
        if !(tolerance >= 1e-12 && tolerance < 1e-2) {
            return Err(LlsError::Argument(format!("tolerance must lie in [1e-12, 1e-2), got {tolerance}")));
        }
        let coeffs = series_coefficients(SERIES_DEGREE);
        let root_coeffs = root_series(&coeffs);
        let mut table = Self {
            coeffs,
            root_coeffs,
            t_max,
            tolerance,
            nodes: Vec::new(),
        };
        let y0 = table.series_state(T0);
        table.nodes = integrate(T0, y0, t_max, tolerance, true)?.1;
        Ok(table)
    }

    /// Shared table on `(0, 50]` at tolerance `1e-12`.
    pub fn shared() -> &'static PainleveTable {
        static TABLE: OnceLock<PainleveTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            PainleveTable::new(DEFAULT_T_MAX, DEFAULT_TOLERANCE).expect("default Painlevé table builds")
        })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Series coefficients `a_k` of `σ(t) = Σ a_k t^k`, indexed by power.
    pub fn taylor_coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Number of accepted integration steps.
    pub fn steps(&self) -> usize {
        self.nodes.len()
    }

    pub fn sigma(&self, t: f64) -> Result<f64> {
        Ok(self.point(t)?.sigma)
    }

    fn series_state(&self, t: f64) -> State {
        let (mut s, mut ds, mut i2) = (0.0, 0.0, 0.0);
        for k in (1..self.coeffs.len()).rev() {
            let a = self.coeffs[k];
            s = s * t + a;
            ds = ds * t + k as f64 * a;
            i2 = i2 * t + a / k as f64;
        }
        let mut i1 = 0.0;
        for (m, h) in self.root_coeffs.iter().enumerate().rev() {
            i1 = i1 * t + h / (m + 1) as f64;
        }
        [s * t, ds, i2 * t, i1 * t]
    }

    /// Solution data at `t ∈ [0, t_max]`.
    pub fn point(&self, t: f64) -> Result<PainlevePoint> {
        if !(0.0..=self.t_max).contains(&t) {
            return Err(LlsError::Argument(format!("t = {t} outside [0, {}]", self.t_max)));
        }
        if t <= T0 {
            return Ok(self.series_point(t));
        }
        let idx = self.nodes.partition_point(|(tn, _)| *tn <= t) - 1;
        let (tn, yn) = self.nodes[idx];
        let y = if tn == t {
            yn
        } else {
            integrate(tn, yn, t, self.tolerance, false)?.0
        };
        Ok(point_from_state(t, &y))
    }

    fn series_point(&self, t: f64) -> PainlevePoint {
        let a = &self.coeffs;
        let (mut sot, mut dsot) = (0.0, 0.0);
        // σ/t = Σ a_k t^{k-1}; (σ/t)' = Σ (k-1) a_k t^{k-2}
        for k in (1..a.len()).rev() {
            sot = sot * t + a[k];
        }
        for k in (2..a.len()).rev() {
            dsot = dsot * t + (k - 1) as f64 * a[k];
        }
        let (mut root, mut d_root) = (0.0, 0.0);
        let h = &self.root_coeffs;
        for m in (0..h.len()).rev() {
            root = root * t + h[m];
        }
        for m in (1..h.len()).rev() {
            d_root = d_root * t + m as f64 * h[m];
        }
        let y = self.series_state(t);
        PainlevePoint {
            t,
            sigma: y[0],
            sigma_over_t: sot,
            d_sigma_over_t: dsot,
            root,
            d_root,
            i1: y[3],
            i2: y[2],
        }
    }
}

fn point_from_state(t: f64, y: &State) -> PainlevePoint {
    let (s, ds) = (y[0], y[1]);
    let b = t * ds - s;
    let c = b + 4.0 * ds * ds;
    let root = (-b).max(0.0).sqrt() / t;
    PainlevePoint {
        t,
        sigma: s,
        sigma_over_t: s / t,
        d_sigma_over_t: b / (t * t),
        root,
        d_root: c.max(0.0).sqrt() / (2.0 * t) - root / t,
        i1: y[3],
        i2: y[2],
    }
}

/// Coefficients `a_0 = 0, a_1 .. a_degree` of the series solution.
fn series_coefficients(degree: usize) -> Vec<f64> {
    let mut a = vec![0.0; degree + 2];
    let a1 = -1.0 / (2.0 * PI);
    a[1] = a1;
    a[2] = -a1 * a1;
    for k in 3..=degree {
        // With a_k = 0 the order-k residual is linear in a_k with slope
        // -4(k-1)² a_1².
        let r = residual_coefficient(&a, k);
        a[k] = r / (4.0 * ((k - 1) * (k - 1)) as f64 * a1 * a1);
    }
    a.truncate(degree + 1);
    a
}

/// Coefficient of `t^k` in the left-hand side of the equation.
fn residual_coefficient(a: &[f64], k: usize) -> f64 {
    let get = |j: usize| a.get(j).copied().unwrap_or(0.0);
    // t σ''
    let tdd = |j: usize| if j == 0 { 0.0 } else { ((j + 1) * j) as f64 * get(j + 1) };
    // t σ' - σ
    let bb = |j: usize| if j == 0 { 0.0 } else { (j as f64 - 1.0) * get(j) };
    // σ'
    let d = |j: usize| (j + 1) as f64 * get(j + 1);
    let cc = |j: usize| bb(j) + 4.0 * (0..=j).map(|i| d(i) * d(j - i)).sum::<f64>();
    (0..=k).map(|i| tdd(i) * tdd(k - i) + bb(i) * cc(k - i)).sum()
}

/// Series of `sqrt(-(σ/t)')`, from `-(σ/t)' = Σ_m -(m+1) a_{m+2} t^m`.
fn root_series(a: &[f64]) -> Vec<f64> {
    let len = a.len() - 2;
    let g: Vec<f64> = (0..len).map(|m| -((m + 1) as f64) * a[m + 2]).collect();
    let mut h = vec![0.0; len];
    h[0] = g[0].sqrt();
    for m in 1..len {
        let cross: f64 = (1..m).map(|i| h[i] * h[m - i]).sum();
        h[m] = (g[m] - cross) / (2.0 * h[0]);
    }
    h
}

fn rhs(t: f64, y: &State, tol: f64) -> Result<State> {
    let (s, ds) = (y[0], y[1]);
    let b = t * ds - s;
    let radicand = -b * (b + 4.0 * ds * ds);
    if radicand < -tol * (1.0 + b.abs() * (b + 4.0 * ds * ds).abs()) {
        return Err(LlsError::Solver {
            location: t,
            message: format!("negative radicand {radicand:e}: sign branch lost"),
        });
    }
    let neg_b = (-b).max(0.0);
    Ok([ds, -radicand.max(0.0).sqrt() / t, s / t, neg_b.sqrt() / t])
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates from `(t, y)` to `t_end`. Returns the final state and, when
/// `record` is set, every accepted step.
fn integrate(mut t: f64, mut y: State, t_end: f64, tol: f64, record: bool) -> Result<(State, Vec<(f64, State)>)> {
    let mut nodes = Vec::new();
    if record {
        nodes.push((t, y));
    }
    let mut h = (t_end - t).min(1e-3);
    let mut k = [[0.0; 4]; 7];
    k[0] = rhs(t, &y, tol)?;
    let mut steps = 0usize;
    while t < t_end {
        steps += 1;
        if steps > 1_000_000 {
            return Err(LlsError::Solver { location: t, message: "step budget exhausted".into() });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                for j in 0..s {
                    *yi += h * A[s][j] * k[j][i];
                }
            }
            k[s] = rhs(t + C[s] * h, &ys, tol)?;
        }
        let mut y_new = y;
        for (i, yi) in y_new.iter_mut().enumerate() {
            for j in 0..6 {
                *yi += h * A[6][j] * k[j][i];
            }
        }
        let mut err = 0.0;
        for i in 0..4 {
            let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * h;
            let scale = tol * (1.0 + y[i].abs().max(y_new[i].abs()));
            err += (e / scale).powi(2);
        }
        let err = (err / 4.0).sqrt();
        if !err.is_finite() {
            return Err(LlsError::Solver { location: t, message: "non-finite step".into() });
        }
        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            y = y_new;
            k[0] = k[6];
            if record {
                nodes.push((t, y));
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-14 * t.max(1.0) {
            return Err(LlsError::Solver { location: t, message: "step size underflow".into() });
        }
    }
    Ok((y, nodes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_coefficients() {
        let a = series_coefficients(SERIES_DEGREE);
        let a1 = -1.0 / (2.0 * PI);
        assert_eq!(a[0], 0.0);
        assert_eq!(a[1], a1);
        assert!((a[2] * 4.0 * PI * PI + 1.0).abs() < 1e-15);
        assert!((a[3] / a1.powi(3) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn series_satisfies_equation() {
        let a = series_coefficients(SERIES_DEGREE);
        for k in 2..=SERIES_DEGREE {
            let r = residual_coefficient(&a, k);
            assert!(r.abs() < 1e-15, "order {k}: {r:e}");
        }
    }

    #[test]
    fn small_t_limit() {
        let table = PainleveTable::shared();
        for t in [1e-6, 1e-4, 1e-3] {
            let ratio = table.sigma(t).unwrap() / t;
            assert!((ratio + 1.0 / (2.0 * PI)).abs() < 2.0 * t / (4.0 * PI * PI));
        }
    }

    #[test]
    fn series_and_integrator_agree_past_t0() {
        let table = PainleveTable::shared();
        for t in [0.02, 0.1, 0.3] {
            let p = table.point(t).unwrap();
            let q = table.series_point(t);
            assert!((p.sigma - q.sigma).abs() < 1e-10);
            assert!((p.i1 - q.i1).abs() < 1e-10, "{} vs {}", p.i1, q.i1);
            assert!((p.i2 - q.i2).abs() < 1e-10);
            assert!((p.root - q.root).abs() < 1e-10);
            assert!((p.d_root - q.d_root).abs() < 1e-8, "{} vs {}", p.d_root, q.d_root);
        }
    }

    #[test]
    fn residual_small_along_solution() {
        let table = PainleveTable::shared();
        for &t in &[0.5, 2.0, 7.0, 20.0, 45.0] {
            let h = 1e-3;
            let s = |x: f64| table.sigma(x).unwrap();
            let (s0, sp, sm) = (s(t), s(t + h), s(t - h));
            let d1 = (sp - sm) / (2.0 * h);
            let d2 = (sp - 2.0 * s0 + sm) / (h * h);
            let b = t * d1 - s0;
            let res = (t * d2).powi(2) + b * (b + 4.0 * d1 * d1);
            let scale = (t * d2).powi(2) + (b * (b + 4.0 * d1 * d1)).abs();
            assert!(res.abs() < 1e-5 * scale, "t={t}: {res:e} / {scale:e}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(PainleveTable::new(60.0, 1e-10).is_err());
        assert!(PainleveTable::new(10.0, 1e-14).is_err());
        assert!(PainleveTable::shared().point(51.0).is_err());
    }
}
