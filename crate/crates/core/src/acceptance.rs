//! The fifteen acceptance criteria, shared by the `acceptance` test target
//! and the `report` command.
//!
//! Criteria that need the same Monte Carlo run (for instance the unitary
//! means, the estimator duality and the covariance link) read it from a
//! per-suite cache, so each run happens once.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::deterministic::{
    parse_zeros_file, parse_zeros_str, riemann_unfold, BilliardFamily, OffsetSpec, BUNDLED_ZEROS,
};
use crate::ensembles::{EnsembleConfig, EnsembleSampler};
use crate::error::{arg_err, LlsError, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::rng::{derived_seed, sample_rng};
use crate::spacing::{generating_identity_residual, CircularSpectrum, LineSpectrum, Scale};
use crate::statistics::{
    covariance_from_means, ks_one_sample, origin_power_law, protocol1, protocol2_param,
    protocol2_points, ratios, spaced_reference_points, Histogram, LocalRStats, RunningStats, SpacingStats, Workers,
    R_BINS, R_MAX, Z99,
};
use crate::syk::{
    build_even_block, build_hamiltonian, bulk_record, majorana_ops, sample_couplings, SykConfig, SykSampler,
};
use crate::theory::{
    default_quad_order, fredholm_counts, gap_probability, mean_lls_reference, mean_lls_theory, p0_pdf,
    poisson_r_cdf, r_ratio_reference, ratio_reference, MEAN_LLS_THEORY, RIEMANN_MEAN_LLS,
};

/// Environment variable naming a user-supplied high-height zeros file.
pub const ZEROS_ENV: &str = "LLS_ZEROS_FILE";
/// Environment variable selecting the profile of the test target.
pub const PROFILE_ENV: &str = "LLS_ACCEPTANCE_PROFILE";

pub const CRITERIA: u8 = 15;

const CIRCLE_N: usize = 64;
const CIRCLE_SAMPLES: u64 = 100_000;
/// Local records keep ten spacings so that `r_8` is available.
const CIRCLE_LAGS: usize = 9;
const REPORTED_LAGS: usize = 4;
const POISSON_N: usize = 1024;
const POISSON_SAMPLES: u64 = 1_000_000;
const SHAPE_SAMPLES: u64 = 1_000_000;
const SHAPE_BINS: usize = 50;
const SHAPE_S_MAX: f64 = 4.0;
const SLOPE_MIN_COUNT: usize = 10_000;
/// Spacings below this are kept for the small-spacing fits.
const SLOPE_CUT: f64 = 1.0;
const BILLIARD_DRAWS: u64 = 100_000;
const SYK_RUNS: [(usize, u64); 3] = [(16, 20_000), (18, 10_000), (20, 5_000)];
const IDENTITY_CASES: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// Deterministic and structural criteria only.
    Smoke,
    /// Every criterion at desk scale.
    Desk,
    /// Desk scale with twice the samples.
    FullDesk,
}

impl Profile {
    fn runs_monte_carlo(self) -> bool {
        self != Profile::Smoke
    }

    fn samples(self, base: u64) -> u64 {
        match self {
            Profile::FullDesk => 2 * base,
            _ => base,
        }
    }
}

impl FromStr for Profile {
    type Err = LlsError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smoke" => Ok(Profile::Smoke),
            "desk" => Ok(Profile::Desk),
            "full-desk" | "full_desk" => Ok(Profile::FullDesk),
            other => arg_err(format!("unknown profile '{other}' (smoke, desk, full-desk)")),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Smoke => "smoke",
            Profile::Desk => "desk",
            Profile::FullDesk => "full-desk",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bound {
    Within { target: f64, tolerance: f64 },
    Above { bound: f64 },
    Below { bound: f64 },
    Holds,
}

/// One measured quantity against its bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    #[serde(flatten)]
    pub bound: Bound,
    pub pass: bool,
}

impl Check {
    pub fn within(label: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        let pass = (measured - target).abs() <= tolerance;
        Self { label: label.into(), measured, bound: Bound::Within { target, tolerance }, pass }
    }

    pub fn above(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { label: label.into(), measured, bound: Bound::Above { bound }, pass: measured > bound }
    }

    pub fn below(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { label: label.into(), measured, bound: Bound::Below { bound }, pass: measured < bound }
    }

    pub fn holds(label: impl Into<String>, ok: bool) -> Self {
        Self { label: label.into(), measured: if ok { 1.0 } else { 0.0 }, bound: Bound::Holds, pass: ok }
    }

    /// Fraction of the allowed room used; above 1 fails.
    fn usage(&self) -> f64 {
        let m = self.measured;
        let u = match self.bound {
            Bound::Within { target, tolerance } => (m - target).abs() / tolerance,
            Bound::Above { bound } => {
                if m > 0.0 && bound > 0.0 {
                    bound / m
                } else if m > bound {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Bound::Below { bound } => m / bound,
            Bound::Holds => {
                if self.pass {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        };
        if u.is_nan() {
            f64::INFINITY
        } else {
            u
        }
    }
}

/// Four significant digits.
fn short(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor();
    if !(-3.0..5.0).contains(&magnitude) {
        return format!("{x:.3e}");
    }
    let scale = 10f64.powf(3.0 - magnitude);
    ((x * scale).round() / scale).to_string()
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bound {
            Bound::Within { target, tolerance } => {
                write!(f, "{}: {:.6} vs {} ± {}", self.label, self.measured, target, short(tolerance))
            }
            Bound::Above { bound } => write!(f, "{}: {:.4e} > {}", self.label, self.measured, bound),
            Bound::Below { bound } => write!(f, "{}: {:.4e} < {:e}", self.label, self.measured, bound),
            Bound::Holds => write!(f, "{}: {}", self.label, if self.pass { "holds" } else { "violated" }),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub verdict: Verdict,
    /// Reason for a skip or an error.
    pub note: Option<String>,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl CriterionResult {
    fn from_checks(id: u8, checks: Vec<Check>, seconds: f64) -> Self {
        let verdict = if checks.iter().all(|c| c.pass) { Verdict::Pass } else { Verdict::Fail };
        Self { id, title: title(id), verdict, note: None, checks, seconds }
    }

    fn noted(id: u8, verdict: Verdict, note: String, seconds: f64) -> Self {
        Self { id, title: title(id), verdict, note: Some(note), checks: Vec::new(), seconds }
    }

    /// The check closest to (or furthest past) its bound.
    pub fn worst(&self) -> Option<&Check> {
        self.checks.iter().max_by(|a, b| a.usage().total_cmp(&b.usage()))
    }

    /// One-line summary.
    pub fn line(&self) -> String {
        let what = match (&self.note, self.worst()) {
            (Some(n), _) => n.clone(),
            (None, Some(w)) => {
                let failing = self.checks.iter().filter(|c| !c.pass).count();
                if failing > 0 {
                    format!("{failing} of {} checks fail; worst {w}", self.checks.len())
                } else {
                    format!("{} checks; tightest {w}", self.checks.len())
                }
            }
            (None, None) => String::new(),
        };
        format!("{:<7} {:>2}  {}: {}  [{:.1} s]", self.verdict, self.id, self.title, what, self.seconds)
    }
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "theory means, unitary class",
        2 => "gap probability, two routes",
        3 => "Monte Carlo means, CUE",
        4 => "Monte Carlo means, COE and CSE",
        5 => "Poisson exactness",
        6 => "inequality suite",
        7 => "generating-function identity",
        8 => "estimator duality",
        9 => "covariance link",
        10 => "distribution shapes",
        11 => "SYK ratios",
        12 => "billiard parameter protocol",
        13 => "local r-ratios",
        14 => "zeta-zero pipeline",
        15 => "SYK structure",
        _ => "unknown",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub profile: Profile,
    pub seed: u64,
    /// Worker threads, 0 for automatic.
    pub threads: usize,
    pub zeros_file: Option<PathBuf>,
}

impl SuiteConfig {
    pub fn new(profile: Profile) -> Self {
        Self { profile, seed: 1, threads: 0, zeros_file: None }
    }

    /// Profile and zeros file from the environment, other fields default.
    pub fn from_env() -> Result<Self> {
        let profile = match std::env::var(PROFILE_ENV) {
            Ok(p) => p.parse()?,
            Err(_) => Profile::Desk,
        };
        let mut c = Self::new(profile);
        c.zeros_file = std::env::var_os(ZEROS_ENV).map(PathBuf::from);
        Ok(c)
    }
}

type Cached<T> = OnceLock<std::result::Result<T, String>>;

/// Local statistics of one circular ensemble at a fixed reference point.
#[derive(Debug, Clone)]
struct CircleRun {
    local: SpacingStats,
    r: LocalRStats,
}

/// Full unitary spectra: the local statistics plus the whole-spectrum
/// estimators and small spacings.
#[derive(Debug, Clone)]
struct UnitaryRun {
    circle: CircleRun,
    size_biased: Vec<RunningStats>,
    lag1_cov: RunningStats,
    small: Vec<f64>,
}

#[derive(Debug, Clone)]
struct ShapeRun {
    zeroth: Histogram,
    small: Vec<f64>,
}

pub struct Suite {
    config: SuiteConfig,
    workers: Workers,
    unitary: Cached<UnitaryRun>,
    circle: [Cached<CircleRun>; 2],
    poisson: Cached<CircleRun>,
    shape: Cached<ShapeRun>,
}

/// Accumulator with failure bookkeeping for index folds.
struct Tally<A> {
    acc: A,
    attempted: u64,
    failed: u64,
    last_error: Option<String>,
}

fn fold_samples<A: Send>(
    workers: &Workers,
    total: u64,
    init: impl Fn() -> A + Sync,
    step: impl Fn(&mut A, u64) -> Result<()> + Sync,
    merge: impl Fn(&mut A, A),
) -> Result<A> {
    let t = workers.fold_indices(
        total,
        || Tally { acc: init(), attempted: 0, failed: 0, last_error: None },
        |t, i| {
            t.attempted += 1;
            if let Err(e) = step(&mut t.acc, i) {
                t.failed += 1;
                t.last_error = Some(e.to_string());
            }
        },
        |a, b| {
            a.attempted += b.attempted;
            a.failed += b.failed;
            if b.last_error.is_some() {
                a.last_error = b.last_error;
            }
            merge(&mut a.acc, b.acc);
        },
    );
    if t.failed as f64 > 0.01 * t.attempted as f64 {
        return Err(LlsError::RunFailed {
            failed: t.failed as usize,
            total: t.attempted as usize,
            reason: t.last_error.unwrap_or_default(),
        });
    }
    Ok(t.acc)
}

fn cached<T: Clone>(cell: &Cached<T>, make: impl FnOnce() -> Result<T>) -> Result<T> {
    cell.get_or_init(|| make().map_err(|e| e.to_string()))
        .clone()
        .map_err(|reason| LlsError::RunFailed { failed: 0, total: 0, reason })
}

impl Suite {
    pub fn new(config: SuiteConfig) -> Result<Self> {
        let workers = Workers::new(config.threads)?;
        Ok(Self {
            config,
            workers,
            unitary: OnceLock::new(),
            circle: [OnceLock::new(), OnceLock::new()],
            poisson: OnceLock::new(),
            shape: OnceLock::new(),
        })
    }

    pub fn config(&self) -> &SuiteConfig {
        &self.config
    }

    fn seed(&self, stream: u64) -> u64 {
        derived_seed(self.config.seed, stream)
    }

    fn samples(&self, base: u64) -> u64 {
        self.config.profile.samples(base)
    }

    /// Runs one criterion; errors become a FAIL with a note.
    pub fn run(&self, id: u8) -> CriterionResult {
        let start = Instant::now();
        let needs_mc = matches!(id, 3..=6 | 8..=13);
        if needs_mc && !self.config.profile.runs_monte_carlo() {
            return CriterionResult::noted(id, Verdict::Skipped, format!("not part of the {} profile", self.config.profile), 0.0);
        }
        let outcome = match id {
            1 => self.theory_means(),
            2 => self.gap_routes(),
            3 => self.unitary_means(),
            4 => self.orthogonal_symplectic_means(),
            5 => self.poisson_exactness(),
            6 => self.inequalities(),
            7 => self.generating_identity(),
            8 => self.estimator_duality(),
            9 => self.covariance_link(),
            10 => self.shapes(),
            11 => self.syk_ratios(),
            12 => self.billiards(),
            13 => self.r_ratios(),
            14 => self.zeros_pipeline(),
            15 => self.syk_structure(),
            _ => arg_err(format!("no criterion {id}")),
        };
        let seconds = start.elapsed().as_secs_f64();
        match outcome {
            Ok(Outcome::Checks(mut checks)) => {
                if id == 1 {
                    checks.push(Check::below("runtime [s]", seconds, 60.0));
                }
                CriterionResult::from_checks(id, checks, seconds)
            }
            Ok(Outcome::Skipped(why)) => CriterionResult::noted(id, Verdict::Skipped, why, seconds),
            Err(e) => CriterionResult::noted(id, Verdict::Fail, format!("error: {e}"), seconds),
        }
    }

    /// Runs every criterion in order, handing each result to `each` as soon
    /// as it is known.
    pub fn run_all(&self, mut each: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
        (1..=CRITERIA)
            .map(|id| {
                let r = self.run(id);
                each(&r);
                r
            })
            .collect()
    }

    // ---- shared runs ----

    fn circle_sampler(&self, beta: u8, n: usize, stream: u64) -> Result<EnsembleSampler> {
        EnsembleSampler::new(EnsembleConfig::new(beta, n, self.seed(stream)))
    }

    fn circle_run(&self, beta: u8) -> Result<CircleRun> {
        let slot = match beta {
            1 => 0,
            4 => 1,
            _ => return arg_err("local-record runs are for beta 1 and 4"),
        };
        cached(&self.circle[slot], || {
            let sampler = self.circle_sampler(beta, CIRCLE_N, 100 + beta as u64)?;
            fold_samples(
                &self.workers,
                self.samples(CIRCLE_SAMPLES),
                || empty_circle_run(CIRCLE_LAGS, 0),
                |acc, i| {
                    let rec = sampler.local_record(i, PI, CIRCLE_LAGS)?;
                    acc.local.push(&rec.spacings);
                    acc.r.push(&rec.spacings)
                },
                merge_circle_run,
            )
        })
    }

    fn unitary_run(&self) -> Result<UnitaryRun> {
        cached(&self.unitary, || {
            let sampler = self.circle_sampler(2, CIRCLE_N, 102)?;
            let delta = TAU / CIRCLE_N as f64;
            fold_samples(
                &self.workers,
                self.samples(CIRCLE_SAMPLES),
                || UnitaryRun {
                    circle: empty_circle_run(CIRCLE_LAGS, 0),
                    size_biased: vec![RunningStats::new(); REPORTED_LAGS + 1],
                    lag1_cov: RunningStats::new(),
                    small: Vec::new(),
                },
                |acc, i| {
                    let spectrum = sampler.spectrum(i)?;
                    let rec = spectrum.local_spacings(PI, CIRCLE_LAGS)?.scaled(1.0 / delta);
                    let gaps = spectrum.consecutive_spacings()?;
                    acc.circle.local.push(&rec.spacings);
                    acc.circle.r.push(&rec.spacings)?;
                    for (ell, s) in acc.size_biased.iter_mut().enumerate() {
                        s.push(gaps.size_biased_mean(ell)? / delta);
                    }
                    acc.lag1_cov.push(gaps.lagged_product_mean(1) / (delta * delta) - 1.0);
                    acc.small.extend(gaps.spacings.iter().map(|s| s / delta).filter(|s| *s < SLOPE_CUT));
                    Ok(())
                },
                |a, b| {
                    merge_circle_run(&mut a.circle, b.circle);
                    for (x, y) in a.size_biased.iter_mut().zip(&b.size_biased) {
                        x.merge(y);
                    }
                    a.lag1_cov.merge(&b.lag1_cov);
                    a.small.extend(b.small);
                },
            )
        })
    }

    fn poisson_run(&self) -> Result<CircleRun> {
        cached(&self.poisson, || {
            let sampler = self.circle_sampler(0, POISSON_N, 100)?;
            fold_samples(
                &self.workers,
                self.samples(POISSON_SAMPLES),
                || empty_circle_run(REPORTED_LAGS, 2),
                |acc, i| {
                    let rec = sampler.local_record(i, 0.0, REPORTED_LAGS)?;
                    acc.local.push(&rec.spacings);
                    acc.r.push(&rec.spacings)
                },
                merge_circle_run,
            )
        })
    }

    fn shape_run(&self) -> Result<ShapeRun> {
        cached(&self.shape, || {
            let sampler = self.circle_sampler(2, CIRCLE_N, 110)?;
            fold_samples(
                &self.workers,
                self.samples(SHAPE_SAMPLES),
                || ShapeRun { zeroth: Histogram::new(SHAPE_BINS, SHAPE_S_MAX).expect("valid bins"), small: Vec::new() },
                |acc, i| {
                    let s0 = sampler.local_record(i, PI, 1)?.spacings[0];
                    acc.zeroth.push(s0);
                    if s0 < SLOPE_CUT {
                        acc.small.push(s0);
                    }
                    Ok(())
                },
                |a, b| {
                    a.zeroth.merge(&b.zeroth);
                    a.small.extend(b.small);
                },
            )
        })
    }

    // ---- criteria ----

    fn theory_means(&self) -> Result<Outcome> {
        let row = table_row(2);
        let mut checks = Vec::new();
        for (ell, want) in row.iter().enumerate() {
            checks.push(Check::within(format!("<s_{ell}>"), mean_lls_theory(2, ell)?, *want, 1e-4));
        }
        Ok(Outcome::Checks(checks))
    }

    fn gap_routes(&self) -> Result<Outcome> {
        let mut checks = Vec::new();
        for s in [0.25, 0.5, 1.0, 2.0, 3.0] {
            let ode = gap_probability(2, s)?;
            let det = fredholm_counts(s, 0, default_quad_order(s))?[0];
            checks.push(Check::below(format!("|E(0;{s}) difference|"), (ode - det).abs(), 1e-6));
        }
        Ok(Outcome::Checks(checks))
    }

    fn unitary_means(&self) -> Result<Outcome> {
        let run = self.unitary_run()?;
        Ok(Outcome::Checks(mean_checks("CUE", &run.circle.local, 2, 0.01)))
    }

    fn orthogonal_symplectic_means(&self) -> Result<Outcome> {
        let mut checks = mean_checks("COE", &self.circle_run(1)?.local, 1, 0.015);
        checks.extend(mean_checks("CSE", &self.circle_run(4)?.local, 4, 0.015));
        Ok(Outcome::Checks(checks))
    }

    fn poisson_exactness(&self) -> Result<Outcome> {
        let run = self.poisson_run()?;
        let mut checks = vec![Check::within("<s_0>", run.local.mean(0), 2.0, 0.01)];
        for ell in 1..=REPORTED_LAGS {
            checks.push(Check::within(format!("<s_{ell}>"), run.local.mean(ell), 1.0, 0.005));
        }
        for r in ratios(&run.local)? {
            checks.push(Check::within(format!("ratio_{}", r.ell), r.value, 0.5, 0.005));
        }
        Ok(Outcome::Checks(checks))
    }

    fn inequalities(&self) -> Result<Outcome> {
        let runs = [
            ("CUE", self.unitary_run()?.circle.local),
            ("COE", self.circle_run(1)?.local),
            ("CSE", self.circle_run(4)?.local),
            ("Poisson", self.poisson_run()?.local),
        ];
        let mut checks = Vec::new();
        for (name, stats) in &runs {
            checks.push(Check::above(format!("{name} (<s_0> - 1)/se"), (stats.mean(0) - 1.0) / stats.stderr(0), 5.0));
            for ell in 1..=stats.max_ell() {
                let n = stats.count() as f64;
                let var = stats.variance(0) + stats.variance(ell) - 2.0 * stats.covariance_with_zeroth(ell);
                let z = (stats.mean(0) - stats.mean(ell)) / (var / n).sqrt();
                checks.push(Check::above(format!("{name} (<s_0> - <s_{ell}>)/se"), z, 5.0));
            }
        }
        Ok(Outcome::Checks(checks))
    }

    fn generating_identity(&self) -> Result<Outcome> {
        let start = Instant::now();
        let mut worst = 0.0f64;
        let mut rng = sample_rng(self.seed(7), 0);
        for _ in 0..IDENTITY_CASES {
            let n = rng.random_range(2..=128usize);
            let spectrum = CircularSpectrum::from_unsorted((0..n).map(|_| rng.random::<f64>() * TAU))?;
            let z = Complex64::from_polar(rng.random::<f64>(), rng.random::<f64>() * TAU);
            worst = worst.max(generating_identity_residual(&spectrum, z)? / (1e-10 * n as f64));
        }
        let seconds = start.elapsed().as_secs_f64();
        Ok(Outcome::Checks(vec![
            Check::below("max residual / (1e-10 N)", worst, 1.0),
            Check::below("runtime [s]", seconds, 1.0),
        ]))
    }

    fn estimator_duality(&self) -> Result<Outcome> {
        let run = self.unitary_run()?;
        let local = &run.circle.local;
        let checks = (0..=REPORTED_LAGS)
            .map(|ell| {
                let sb = &run.size_biased[ell];
                let (a, b) = (local.mean(ell), sb.mean());
                let se = (local.stderr(ell).powi(2) + sb.stderr().powi(2)).sqrt();
                Check::within(format!("fixed-point minus size-biased, l={ell}"), a - b, 0.0, Z99 * se)
            })
            .collect();
        Ok(Outcome::Checks(checks))
    }

    fn covariance_link(&self) -> Result<Outcome> {
        let run = self.unitary_run()?;
        let from_means = covariance_from_means(&run.circle.local, 1.0)[1];
        let direct = &run.lag1_cov;
        let se = (from_means.stderr.powi(2) + direct.stderr().powi(2)).sqrt();
        Ok(Outcome::Checks(vec![
            Check::within("lag-1 covariance, from means minus direct", from_means.value - direct.mean(), 0.0, Z99 * se),
            Check::below("lag-1 covariance from means (negative)", from_means.value, 0.0),
        ]))
    }

    fn shapes(&self) -> Result<Outcome> {
        let shape = self.shape_run()?;
        let unitary = self.unitary_run()?;
        let centers: Vec<f64> = (0..shape.zeroth.bins()).map(|i| shape.zeroth.bin_center(i)).collect();
        let theory = p0_pdf(2, &centers)?;
        let sup = shape
            .zeroth
            .density()
            .iter()
            .zip(&theory)
            .map(|(d, t)| (d - t).abs())
            .fold(0.0, f64::max);
        let mut checks = vec![Check::below("sup |p0 histogram - theory|", sup, 0.02)];
        for (label, samples, want) in [("p0 origin exponent", &shape.small, 3.0), ("p origin exponent", &unitary.small, 2.0)] {
            let fit = origin_power_law(samples, SLOPE_MIN_COUNT)?;
            if fit.upper >= SLOPE_CUT {
                return Err(LlsError::Precision(format!("{label}: fit window reaches the sample cut")));
            }
            checks.push(Check::within(label, fit.exponent, want, 0.3));
        }
        Ok(Outcome::Checks(checks))
    }

    fn syk_ratios(&self) -> Result<Outcome> {
        let mut checks = Vec::new();
        for (i, (n, m)) in SYK_RUNS.iter().enumerate() {
            let config = SykConfig::new(*n, 1.0, self.seed(200 + i as u64));
            let beta = config.symmetry_beta();
            let sampler = SykSampler::new(config)?;
            let stats = protocol1(&sampler, 0.0, 3, self.samples(*m), &self.workers)?;
            for r in ratios(&stats)? {
                let want = ratio_reference(beta, r.ell).expect("tabulated ratio");
                checks.push(Check::within(format!("N={n} ratio_{}", r.ell), r.value, want, 0.02));
            }
        }
        Ok(Outcome::Checks(checks))
    }

    fn billiards(&self) -> Result<Outcome> {
        let family = BilliardFamily {
            area: 4.0 * PI,
            aspect_range: (1.2, 3.0),
            energy_center: 1e8,
            window_halfwidth: 600.0,
            seed: self.seed(12),
        };
        let stats = protocol2_param(|q| family.draw(q), REPORTED_LAGS, self.samples(BILLIARD_DRAWS), &self.workers)?;
        let mut checks = vec![Check::within("<s_0>", stats.mean(0), 2.0, 0.03)];
        for ell in 1..=REPORTED_LAGS {
            checks.push(Check::within(format!("<s_{ell}>"), stats.mean(ell), 1.0, 0.02));
        }
        Ok(Outcome::Checks(checks))
    }

    fn r_ratios(&self) -> Result<Outcome> {
        let circles = [
            ("CUE", 2u8, self.unitary_run()?.circle),
            ("COE", 1, self.circle_run(1)?),
            ("CSE", 4, self.circle_run(4)?),
        ];
        let poisson = self.poisson_run()?;
        let mut checks = Vec::new();
        for (name, run) in circles.iter().map(|(n, _, r)| (*n, r)).chain([("Poisson", &poisson)]) {
            let r0 = &run.r.means[0];
            checks.push(Check::within(format!("{name} <r_0>"), r0.mean(), 1.0, Z99 * r0.stderr()));
        }
        for ell in 0..2 {
            let mut values = poisson.r.kept[ell].clone();
            let ks = ks_one_sample(&mut values, |r| poisson_r_cdf(ell, r));
            checks.push(Check::below(format!("Poisson KS r_{ell} ({} records)", values.len()), ks, 0.01));
        }
        for (name, beta, run) in &circles {
            let want = r_ratio_reference(*beta).expect("tabulated limit");
            checks.push(Check::within(format!("{name} <r_8>"), run.r.means[8].mean(), want, 0.02));
        }
        Ok(Outcome::Checks(checks))
    }

    fn zeros_pipeline(&self) -> Result<Outcome> {
        let bundled = parse_zeros_str(BUNDLED_ZEROS, &OffsetSpec::FromHeader)?;
        let again = parse_zeros_str(&bundled.to_text(), &OffsetSpec::FromHeader)?;
        let based = parse_zeros_str("# base 1e12\n# index 7\n0.1234567890123456789\n0.75\n", &OffsetSpec::FromHeader)?;
        let based_again = parse_zeros_str(&based.to_text(), &OffsetSpec::FromHeader)?;
        let round_trip = Check::holds("parser round trip exact", bundled == again && based == based_again);
        let Some(path) = &self.config.zeros_file else {
            return if round_trip.pass {
                Ok(Outcome::Skipped(format!("round trip exact; no high-height zeros file ({ZEROS_ENV} unset)")))
            } else {
                Ok(Outcome::Checks(vec![round_trip]))
            };
        };
        let data = parse_zeros_file(path, &OffsetSpec::FromHeader)?;
        let unfolded = riemann_unfold(&data)?;
        // as many reference points as the separation rule allows, up to 10⁶
        let room = unfolded.len() as f64 / ((REPORTED_LAGS + 2) as f64 * 1.25);
        let count = (room.floor() as usize).clamp(1, 1_000_000);
        let phis = spaced_reference_points(&unfolded, count, REPORTED_LAGS, self.seed(14))?;
        let stats = protocol2_points(&unfolded, &phis, REPORTED_LAGS)?;
        let mut checks = vec![round_trip];
        for (ell, want) in RIEMANN_MEAN_LLS.iter().enumerate() {
            checks.push(Check::within(format!("<s_{ell}> ({count} points)"), stats.mean(ell), *want, 0.02));
        }
        Ok(Outcome::Checks(checks))
    }

    fn syk_structure(&self) -> Result<Outcome> {
        let mut checks = Vec::new();
        // construction verifies every anticommutator and fails otherwise
        for n in (2..=24).step_by(2) {
            checks.push(Check::holds(format!("Clifford relations, N={n}"), majorana_ops(n).is_ok()));
        }
        let config = SykConfig::new(12, 1.0, self.seed(15));
        let ops = majorana_ops(12)?;
        let couplings = sample_couplings(&config)?;
        let h = build_hamiltonian(&ops, &couplings)?;
        let p = ops.parity_operator();
        let comm = (&h * &p - &p * &h).iter().map(|z| z.norm()).fold(0.0, f64::max);
        checks.push(Check::below("max |[H, P]|, N=12", comm, 1e-12));

        let ev = hermitian_eigenvalues(build_even_block(&ops, &couplings)?);
        let width = ev[ev.len() - 1] - ev[0];
        let split = ev.chunks(2).map(|p| (p[1] - p[0]).abs()).fold(0.0, f64::max) / width;
        checks.push(Check::below("Kramers pair splitting / width, N=12", split, 1e-10));

        let sampler = SykSampler::new(config)?;
        let factor = 7.3;
        let (mut plain, mut scaled) = (SpacingStats::new(3), SpacingStats::new(3));
        for i in 0..50 {
            let c = sampler.couplings(i);
            for (stats, cc) in [(&mut plain, c.clone()), (&mut scaled, c.scaled(factor))] {
                let levels = LineSpectrum::new(sampler.levels_for(&cc)?, Scale::Raw)?;
                stats.push(&bulk_record(&levels, 0.0, 3)?.spacings);
            }
        }
        let worst = ratios(&plain)?
            .iter()
            .zip(ratios(&scaled)?)
            .map(|(a, b)| ((a.value - b.value) / a.value).abs())
            .fold(0.0, f64::max);
        checks.push(Check::below("ratio change under coupling scaling", worst, 1e-12));
        Ok(Outcome::Checks(checks))
    }
}

enum Outcome {
    Checks(Vec<Check>),
    Skipped(String),
}

fn empty_circle_run(max_ell: usize, keep: usize) -> CircleRun {
    CircleRun {
        local: SpacingStats::new(max_ell),
        r: LocalRStats::new(max_ell - 1, R_BINS, R_MAX, keep).expect("valid bins"),
    }
}

fn merge_circle_run(a: &mut CircleRun, b: CircleRun) {
    a.local.merge(&b.local);
    a.r.merge(b.r);
}

fn table_row(beta: u8) -> [f64; 5] {
    MEAN_LLS_THEORY.iter().find(|(b, _)| *b == beta).expect("tabulated row").1
}

fn mean_checks(name: &str, stats: &SpacingStats, beta: u8, tolerance: f64) -> Vec<Check> {
    (0..=REPORTED_LAGS)
        .map(|ell| {
            let want = mean_lls_reference(beta, ell).expect("tabulated mean");
            Check::within(format!("{name} <s_{ell}>"), stats.mean(ell), want, tolerance)
        })
        .collect()
}

/// True when nothing failed.
pub fn all_passed(results: &[CriterionResult]) -> bool {
    results.iter().all(|r| r.verdict != Verdict::Fail)
}
