//! The SYK model with four-body couplings,
//! `H = Σ_{i<j<k<l} J_ijkl χ_i χ_j χ_k χ_l`, and spectra of its even-parity
//! block.

mod majorana;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, LlsError, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::rng::{derived_seed, sample_rng, SampleRng};
use crate::spacing::{LineSpectrum, LocalSpacingRecord, Scale};
use crate::statistics::SampleSource;

pub use majorana::{majorana_ops, majorana_ops_with_budget, MajoranaSet, PauliString, DEFAULT_MEMORY_BUDGET, MAX_MAJORANA};

/// Relative precision of Kramers pairs.
pub const KRAMERS_TOLERANCE: f64 = 1e-10;
/// Gaps below this fraction of the spectral width are reported.
pub const NEAR_DEGENERACY: f64 = 1e-10;
/// Fraction of levels at each edge excluded from local records.
pub const EDGE_FRACTION: f64 = 0.05;
const MAX_ATTEMPTS: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SykConfig {
    pub n_majorana: usize,
    pub coupling: f64,
    pub seed: u64,
    /// Bytes allowed for one dense Hamiltonian.
    pub memory_budget: usize,
}

impl SykConfig {
    pub fn new(n_majorana: usize, coupling: f64, seed: u64) -> Self {
        Self { n_majorana, coupling, seed, memory_budget: DEFAULT_MEMORY_BUDGET }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_majorana < 8 || self.n_majorana % 2 == 1 {
            return arg_err(format!("Majorana count must be even and at least 8, got {}", self.n_majorana));
        }
        if !(self.coupling > 0.0 && self.coupling.is_finite()) {
            return arg_err(format!("coupling must be positive, got {}", self.coupling));
        }
        Ok(())
    }

    /// `6 J² / 𝒩³`
    pub fn coupling_variance(&self) -> f64 {
        6.0 * self.coupling * self.coupling / (self.n_majorana as f64).powi(3)
    }

    /// Whether even-block levels come in Kramers pairs (`𝒩 ≡ 4 mod 8`).
    pub fn kramers(&self) -> bool {
        self.n_majorana % 8 == 4
    }

    /// Dyson index of the even block by the `𝒩 mod 8` rule.
    pub fn symmetry_beta(&self) -> u8 {
        match self.n_majorana % 8 {
            0 => 1,
            4 => 4,
            _ => 2,
        }
    }
}

/// Couplings `J_ijkl` for `i < j < k < l`, in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct Couplings {
    pub n_majorana: usize,
    pub values: Vec<f64>,
}

/// All index quadruples `i < j < k < l` (0-based), lexicographic.
pub fn quadruples(n: usize) -> impl Iterator<Item = [usize; 4]> {
    (0..n).flat_map(move |i| {
        (i + 1..n).flat_map(move |j| (j + 1..n).flat_map(move |k| (k + 1..n).map(move |l| [i, j, k, l])))
    })
}

impl Couplings {
    pub fn scaled(&self, factor: f64) -> Self {
        Self { n_majorana: self.n_majorana, values: self.values.iter().map(|v| v * factor).collect() }
    }
}

fn draw_couplings(config: &SykConfig, rng: &mut SampleRng) -> Couplings {
    let sd = config.coupling_variance().sqrt();
    let values = quadruples(config.n_majorana).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect();
    Couplings { n_majorana: config.n_majorana, values }
}

/// Couplings for the run seed (sample 0).
pub fn sample_couplings(config: &SykConfig) -> Result<Couplings> {
    config.validate()?;
    Ok(draw_couplings(config, &mut sample_rng(config.seed, 0)))
}

/// Pauli strings of every coupling term, with the `(1/√2)^4` folded in later.
fn term_strings(ops: &MajoranaSet) -> Vec<PauliString> {
    quadruples(ops.n_majorana())
        .map(|q| q.iter().fold(PauliString::IDENTITY, |acc, &j| acc.mul(&ops.string(j))))
        .collect()
}

fn check_sizes(ops: &MajoranaSet, couplings: &Couplings) -> Result<()> {
    if ops.n_majorana() != couplings.n_majorana {
        return arg_err(format!(
            "{} operators but couplings for {} Majoranas",
            ops.n_majorana(),
            couplings.n_majorana
        ));
    }
    Ok(())
}

/// Accumulates `Σ J S` over the basis states in `basis`; `index` maps a
/// state back to its position (or `None` outside the block).
fn accumulate(
    strings: &[PauliString],
    couplings: &Couplings,
    basis: &[u128],
    index: impl Fn(u128) -> Option<usize>,
) -> DMatrix<Complex64> {
    let dim = basis.len();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for (s, &j) in strings.iter().zip(&couplings.values) {
        let w = j * 0.25;
        for (col, &b) in basis.iter().enumerate() {
            let (to, c) = s.apply(b);
            if let Some(row) = index(to) {
                h[(row, col)] += c * w;
            }
        }
    }
    // symmetrize away accumulated rounding
    let ht = h.adjoint();
    (h + ht) * Complex64::new(0.5, 0.0)
}

/// Full dense Hamiltonian.
pub fn build_hamiltonian(ops: &MajoranaSet, couplings: &Couplings) -> Result<DMatrix<Complex64>> {
    check_sizes(ops, couplings)?;
    let basis: Vec<u128> = (0..ops.dimension() as u128).collect();
    Ok(accumulate(&term_strings(ops), couplings, &basis, |b| Some(b as usize)))
}

/// Basis states of even parity (even number of set bits), ascending.
pub fn even_basis(n_qubits: usize) -> Vec<u128> {
    (0..1u128 << n_qubits).filter(|b| b.count_ones() % 2 == 0).collect()
}

/// Hamiltonian restricted to the even-parity block.
pub fn build_even_block(ops: &MajoranaSet, couplings: &Couplings) -> Result<DMatrix<Complex64>> {
    check_sizes(ops, couplings)?;
    let basis = even_basis(ops.n_qubits());
    Ok(block_from_strings(&term_strings(ops), couplings, &basis))
}

fn block_from_strings(strings: &[PauliString], couplings: &Couplings, basis: &[u128]) -> DMatrix<Complex64> {
    // position of an even state: rank among even states = b/2 with its last bit dropped
    accumulate(strings, couplings, basis, |b| {
        if b.count_ones() % 2 == 0 {
            Some((b >> 1) as usize)
        } else {
            None
        }
    })
}

/// Collapses Kramers pairs of a sorted list. Fails when neighbours do not
/// pair up.
fn collapse_pairs(levels: &[f64], width: f64) -> Result<Vec<f64>> {
    if levels.len() % 2 == 1 {
        return Err(LlsError::Precision(format!("odd number of levels ({}) in a Kramers block", levels.len())));
    }
    levels
        .chunks(2)
        .map(|p| {
            if (p[1] - p[0]).abs() > KRAMERS_TOLERANCE * width {
                Err(LlsError::Precision(format!("levels {} and {} do not form a Kramers pair", p[0], p[1])))
            } else {
                Ok(0.5 * (p[0] + p[1]))
            }
        })
        .collect()
}

/// Draws SYK Hamiltonians and returns sorted even-block levels.
#[derive(Debug, Clone)]
pub struct SykSampler {
    config: SykConfig,
    ops: MajoranaSet,
    strings: Vec<PauliString>,
    basis: Vec<u128>,
}

impl SykSampler {
    pub fn new(config: SykConfig) -> Result<Self> {
        config.validate()?;
        let ops = majorana_ops_with_budget(config.n_majorana, config.memory_budget)?;
        let strings = term_strings(&ops);
        let basis = even_basis(ops.n_qubits());
        Ok(Self { config, ops, strings, basis })
    }

    pub fn config(&self) -> &SykConfig {
        &self.config
    }

    pub fn ops(&self) -> &MajoranaSet {
        &self.ops
    }

    /// Couplings of sample `index`.
    pub fn couplings(&self, index: u64) -> Couplings {
        draw_couplings(&self.config, &mut sample_rng(self.config.seed, index))
    }

    /// Even-block levels for the given couplings, Kramers pairs collapsed.
    pub fn levels_for(&self, couplings: &Couplings) -> Result<Vec<f64>> {
        check_sizes(&self.ops, couplings)?;
        let block = block_from_strings(&self.strings, couplings, &self.basis);
        let ev = hermitian_eigenvalues(block);
        if ev.iter().any(|e| !e.is_finite()) {
            return Err(LlsError::Solver { location: 0.0, message: "non-finite eigenvalue".into() });
        }
        let width = ev[ev.len() - 1] - ev[0];
        let levels = if self.config.kramers() { collapse_pairs(&ev, width)? } else { ev };
        let tight = levels.windows(2).filter(|w| w[1] - w[0] < NEAR_DEGENERACY * width).count();
        if tight > 0 {
            log::warn!("{tight} near-degenerate level pair(s) below {NEAR_DEGENERACY:e} of the spectral width");
        }
        Ok(levels)
    }

    /// Raw even-block spectrum of sample `index`; retries on solver failure
    /// with derived seeds.
    pub fn spectrum(&self, index: u64) -> Result<LineSpectrum> {
        let mut last = None;
        for attempt in 0..MAX_ATTEMPTS {
            let couplings = if attempt == 0 {
                self.couplings(index)
            } else {
                draw_couplings(&self.config, &mut sample_rng(derived_seed(self.config.seed, attempt), index))
            };
            match self.levels_for(&couplings).and_then(|l| LineSpectrum::new(l, Scale::Raw)) {
                Ok(s) => return Ok(s),
                Err(e) => {
                    log::warn!("SYK sample {index}, attempt {attempt}: {e}");
                    last = Some(e);
                }
            }
        }
        Err(LlsError::SamplerFailure {
            seed: self.config.seed,
            reason: format!("sample {index}: {}", last.map_or_else(String::new, |e| e.to_string())),
        })
    }
}

/// Bulk local record: the window must avoid the outer `EDGE_FRACTION` of
/// levels on both sides.
pub fn bulk_record(spectrum: &LineSpectrum, phi: f64, max_ell: usize) -> Result<LocalSpacingRecord> {
    let rec = spectrum.local_spacings(phi, max_ell)?;
    let n = spectrum.len();
    let edge = (EDGE_FRACTION * n as f64).ceil() as usize;
    if rec.anchor < edge || rec.anchor + max_ell + 1 >= n - edge {
        return Err(LlsError::InsufficientLevels { found: n, needed: 2 * edge + max_ell + 2 });
    }
    Ok(rec)
}

impl SampleSource for SykSampler {
    fn local_record(&self, index: u64, phi: f64, max_ell: usize) -> Result<LocalSpacingRecord> {
        bulk_record(&self.spectrum(index)?, phi, max_ell)
    }
}

/// Even-block spectrum for the run seed.
pub fn syk_spectrum(config: &SykConfig) -> Result<LineSpectrum> {
    SykSampler::new(*config)?.spectrum(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &DMatrix<Complex64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn coupling_count_and_variance() {
        let cfg = SykConfig::new(8, 1.0, 3);
        assert_eq!(sample_couplings(&cfg).unwrap().values.len(), 70);
        let big = SykConfig::new(60, 2.0, 4);
        let v = sample_couplings(&big).unwrap().values;
        assert!(v.len() > 400_000);
        let var = v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
        assert!((var / big.coupling_variance() - 1.0).abs() < 0.02, "{var}");
        assert_eq!(sample_couplings(&cfg).unwrap(), sample_couplings(&cfg).unwrap());
    }

    #[test]
    fn single_term_squares_to_sixteenth() {
        let ops = majorana_ops(8).unwrap();
        let mut c = Couplings { n_majorana: 8, values: vec![0.0; 70] };
        c.values[0] = 1.0;
        let h = build_hamiltonian(&ops, &c).unwrap();
        let m = ops.matrices();
        assert!(max_abs(&(&h - &m[0] * &m[1] * &m[2] * &m[3])) < 1e-15);
        let id = DMatrix::<Complex64>::identity(16, 16) * Complex64::new(1.0 / 16.0, 0.0);
        assert!(max_abs(&(&h * &h - id)) < 1e-15);
    }

    #[test]
    fn hermitian_and_parity_conserving() {
        let cfg = SykConfig::new(12, 1.0, 9);
        let ops = majorana_ops(12).unwrap();
        let h = build_hamiltonian(&ops, &sample_couplings(&cfg).unwrap()).unwrap();
        assert!(max_abs(&(&h - h.adjoint())) < 1e-12);
        let p = ops.parity_operator();
        assert!(max_abs(&(&h * &p - &p * &h)) < 1e-12);
    }

    #[test]
    fn blocks_lose_no_levels() {
        let cfg = SykConfig::new(10, 1.0, 2);
        let ops = majorana_ops(10).unwrap();
        let c = sample_couplings(&cfg).unwrap();
        let full = hermitian_eigenvalues(build_hamiltonian(&ops, &c).unwrap());
        let even = hermitian_eigenvalues(build_even_block(&ops, &c).unwrap());
        // odd block through the complementary basis
        let odd_basis: Vec<u128> = (0..32u128).filter(|b| b.count_ones() % 2 == 1).collect();
        let odd = hermitian_eigenvalues(accumulate(&term_strings(&ops), &c, &odd_basis, |b| {
            odd_basis.binary_search(&b).ok()
        }));
        let mut both: Vec<f64> = even.iter().chain(&odd).copied().collect();
        both.sort_by(f64::total_cmp);
        assert_eq!(both.len(), 32);
        for (a, b) in both.iter().zip(&full) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn even_block_size() {
        let s = SykSampler::new(SykConfig::new(16, 1.0, 1)).unwrap();
        assert_eq!(s.spectrum(0).unwrap().len(), 128);
    }

    #[test]
    fn kramers_pairs_collapse() {
        let s = SykSampler::new(SykConfig::new(12, 1.0, 5)).unwrap();
        let raw = hermitian_eigenvalues(build_even_block(s.ops(), &s.couplings(0)).unwrap());
        assert_eq!(raw.len(), 32);
        let width = raw[31] - raw[0];
        for p in raw.chunks(2) {
            assert!((p[1] - p[0]).abs() < KRAMERS_TOLERANCE * width);
        }
        assert_eq!(s.spectrum(0).unwrap().len(), 16);
        assert!(collapse_pairs(&[0.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn rescaled_couplings_rescale_levels() {
        let s = SykSampler::new(SykConfig::new(10, 1.0, 8)).unwrap();
        let c = s.couplings(3);
        let a = s.levels_for(&c).unwrap();
        let b = s.levels_for(&c.scaled(3.7)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((3.7 * x - y).abs() < 1e-12 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn bulk_records_skip_edges() {
        let spec = LineSpectrum::new((0..100).map(|i| i as f64).collect(), Scale::Raw).unwrap();
        assert!(bulk_record(&spec, 50.5, 4).is_ok());
        assert!(bulk_record(&spec, 3.5, 4).is_err());
        assert!(bulk_record(&spec, 92.5, 4).is_err());
    }

    #[test]
    fn config_checks() {
        assert!(SykConfig::new(6, 1.0, 0).validate().is_err());
        assert!(SykConfig::new(9, 1.0, 0).validate().is_err());
        assert!(SykConfig::new(8, 0.0, 0).validate().is_err());
    }
}
