//! Majorana operators as Jordan–Wigner Pauli strings.
//!
//! A string is `i^phase · X^x Z^z` on `n` qubits, with qubit `q` (the `q`-th
//! tensor factor from the left) stored in bit `n - 1 - q`, so dense matrices
//! follow the usual Kronecker ordering. `Z^z` acts first:
//! `X^x Z^z |b⟩ = (-1)^{|z ∧ b|} |b ⊕ x⟩`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{arg_err, LlsError, Result};

/// Largest Majorana count the bit masks hold.
pub const MAX_MAJORANA: usize = 126;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub x: u128,
    pub z: u128,
    /// Power of `i` in the coefficient.
    pub phase: u8,
}

fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl PauliString {
    pub const IDENTITY: Self = Self { x: 0, z: 0, phase: 0 };

    pub fn mul(&self, other: &Self) -> Self {
        // Z^{z1} X^{x2} = (-1)^{|z1 ∧ x2|} X^{x2} Z^{z1}
        let swap = ((self.z & other.x).count_ones() % 2) as u8 * 2;
        Self {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: (self.phase + other.phase + swap) % 4,
        }
    }

    pub fn coefficient(&self) -> Complex64 {
        i_pow(self.phase)
    }

    /// Image of basis state `b`: `(b', c)` with `S|b⟩ = c|b'⟩`.
    pub fn apply(&self, b: u128) -> (u128, Complex64) {
        let sign = if (self.z & b).count_ones() % 2 == 1 { 2 } else { 0 };
        (b ^ self.x, i_pow(self.phase + sign))
    }

    /// `true` when the two strings anticommute.
    pub fn anticommutes(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 1
    }

    pub fn dense(&self, n_qubits: usize) -> DMatrix<Complex64> {
        let dim = 1usize << n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let (to, c) = self.apply(b as u128);
            m[(to as usize, b)] = c;
        }
        m
    }
}

/// `𝒩` Majorana operators `χ_j = S_j / √2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaSet {
    strings: Vec<PauliString>,
}

/// Default cap on the bytes of one dense Hamiltonian.
pub const DEFAULT_MEMORY_BUDGET: usize = 1 << 30;

/// Majorana count up to which construction checks every anticommutator on
/// dense matrices.
const DENSE_CHECK_MAX: usize = 12;

/// Bytes of a dense complex matrix of the given dimension.
pub(crate) fn dense_bytes(dim: usize) -> usize {
    dim.saturating_mul(dim).saturating_mul(std::mem::size_of::<Complex64>())
}

pub fn majorana_ops(n_majorana: usize) -> Result<MajoranaSet> {
    majorana_ops_with_budget(n_majorana, DEFAULT_MEMORY_BUDGET)
}

pub fn majorana_ops_with_budget(n_majorana: usize, budget: usize) -> Result<MajoranaSet> {
    if n_majorana < 2 || n_majorana % 2 == 1 || n_majorana > MAX_MAJORANA {
        return arg_err(format!("Majorana count must be even in 2..={MAX_MAJORANA}, got {n_majorana}"));
    }
    let n = n_majorana / 2;
    if n >= usize::BITS as usize || dense_bytes(1usize << n) > budget {
        return Err(LlsError::Resource(format!(
            "dimension 2^{n} exceeds the memory budget of {budget} bytes"
        )));
    }
    let bit = |q: usize| 1u128 << (n - 1 - q);
    let mut strings = Vec::with_capacity(n_majorana);
    let mut tail = 0u128;
    for q in 0..n {
        strings.push(PauliString { x: bit(q), z: tail, phase: 0 });
        // Y = i X Z
        strings.push(PauliString { x: bit(q), z: tail | bit(q), phase: 1 });
        tail |= bit(q);
    }
    let set = MajoranaSet { strings };
    set.check_clifford()?;
    Ok(set)
}

impl MajoranaSet {
    pub fn n_majorana(&self) -> usize {
        self.strings.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.strings.len() / 2
    }

    pub fn dimension(&self) -> usize {
        1 << self.n_qubits()
    }

    /// Pauli string of `χ_j` (0-based) without the `1/√2`.
    pub fn string(&self, j: usize) -> PauliString {
        self.strings[j]
    }

    pub fn dense(&self, j: usize) -> DMatrix<Complex64> {
        self.strings[j].dense(self.n_qubits()) * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
    }

    pub fn matrices(&self) -> Vec<DMatrix<Complex64>> {
        (0..self.strings.len()).map(|j| self.dense(j)).collect()
    }

    /// Anticommutators on strings for every size, and on dense matrices for
    /// small sets. The dense check uses the unnormalized strings, whose
    /// entries are exact, so `{S_j, S_k} = 2δ_jk` is compared bit for bit.
    fn check_clifford(&self) -> Result<()> {
        let n = self.strings.len();
        for j in 0..n {
            let s = self.strings[j].mul(&self.strings[j]);
            if s != PauliString::IDENTITY {
                return Err(LlsError::InvalidSpectrum(format!("χ_{j}² is not identity/2")));
            }
            for k in j + 1..n {
                if !self.strings[j].anticommutes(&self.strings[k]) {
                    return Err(LlsError::InvalidSpectrum(format!("χ_{j} and χ_{k} commute")));
                }
            }
        }
        if n <= DENSE_CHECK_MAX {
            let m: Vec<_> = self.strings.iter().map(|s| s.dense(self.n_qubits())).collect();
            let dim = self.dimension();
            let id = DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(2.0, 0.0);
            for j in 0..n {
                for k in j..n {
                    let ac = &m[j] * &m[k] + &m[k] * &m[j];
                    let want = if j == k { id.clone() } else { DMatrix::zeros(dim, dim) };
                    if ac != want {
                        return Err(LlsError::InvalidSpectrum(format!("{{χ_{j}, χ_{k}}} ≠ δ")));
                    }
                }
            }
        }
        Ok(())
    }

    /// String of `2^{𝒩/2} χ_1 ⋯ χ_𝒩`.
    pub fn parity_string(&self) -> PauliString {
        self.strings.iter().fold(PauliString::IDENTITY, |acc, s| acc.mul(s))
    }

    pub fn parity_operator(&self) -> DMatrix<Complex64> {
        self.parity_string().dense(self.n_qubits())
    }
}
