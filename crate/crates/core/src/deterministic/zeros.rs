//! Ordinates of zeta zeros read from text files, and their unfolding by the
//! smooth zero count `(γ/2π) ln(γ/2πe) + 7/8`.
//!
//! File format: one decimal per line. An optional header `# base <decimal>`
//! declares every value an offset from that base (the layout of high-height
//! tables); `# index <n>` records the index of the first zero. Other `#`
//! lines and blank lines are ignored.

use std::f64::consts::{E, PI};
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{LlsError, Result};
use crate::spacing::{LineSpectrum, Scale};

/// The first 10 000 zeros, one ordinate per line.
pub const BUNDLED_ZEROS: &str = include_str!("../../data/zeta_zeros_first_10000.txt");

/// Lowest ordinate the smooth count applies to.
pub const UNFOLD_THRESHOLD: f64 = 2.0 * PI * E;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZerosDataset {
    /// Values as stored: absolute ordinates, or offsets from `base`.
    pub values: Vec<f64>,
    /// Additive base as written in the file, with its parsed value.
    pub base: Option<(String, f64)>,
    /// Index of the first zero in the full sequence.
    pub source_offset: u64,
}

/// How to interpret the values of a zeros file.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum OffsetSpec {
    /// Use the file's header, if any.
    #[default]
    FromHeader,
    /// Values are offsets from this decimal base; a header base must match.
    Base(String),
}

impl ZerosDataset {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Absolute ordinates (loses precision for bases far above 1e15).
    pub fn ordinates(&self) -> Vec<f64> {
        let b = self.base.as_ref().map_or(0.0, |(_, v)| *v);
        self.values.iter().map(|v| b + v).collect()
    }

    /// A contiguous sub-block, keeping track of the first index.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.start >= range.end || range.end > self.values.len() {
            return Err(LlsError::Argument(format!("slice {range:?} outside 0..{}", self.values.len())));
        }
        Ok(Self {
            values: self.values[range.clone()].to_vec(),
            base: self.base.clone(),
            source_offset: self.source_offset + range.start as u64,
        })
    }

    /// Text form that [`parse_zeros_str`] reads back to identical values.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some((b, _)) = &self.base {
            let _ = writeln!(s, "# base {b}");
        }
        if self.source_offset != 0 {
            let _ = writeln!(s, "# index {}", self.source_offset);
        }
        for v in &self.values {
            let _ = writeln!(s, "{v:.16e}");
        }
        s
    }
}

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(LlsError::Parse { line, message: message.into() })
}

fn parse_decimal(text: &str, line: usize) -> Result<f64> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => parse_err(line, format!("not a finite decimal: {text:?}")),
    }
}

pub fn parse_zeros_str(text: &str, spec: &OffsetSpec) -> Result<ZerosDataset> {
    let mut base: Option<(String, f64)> = None;
    let mut source_offset = 0;
    let mut values: Vec<f64> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            let mut parts = rest.split_whitespace();
            match (parts.next(), parts.next()) {
                (Some("base"), Some(b)) => {
                    if !values.is_empty() {
                        return parse_err(line, "base header after data");
                    }
                    base = Some((b.to_string(), parse_decimal(b, line)?));
                }
                (Some("index"), Some(n)) => {
                    source_offset = n.parse().or_else(|_| parse_err(line, format!("bad index {n:?}")))?;
                }
                _ => {}
            }
            continue;
        }
        let v = parse_decimal(t, line)?;
        if let Some(&prev) = values.last() {
            if v <= prev {
                return parse_err(line, format!("value {v} does not increase (previous {prev})"));
            }
        }
        values.push(v);
    }
    if values.is_empty() {
        return parse_err(0, "no values");
    }
    if let OffsetSpec::Base(b) = spec {
        let parsed = parse_decimal(b, 0)?;
        match &base {
            Some((_, v)) if *v != parsed => return parse_err(0, format!("header base conflicts with {b}")),
            _ => base = Some((b.clone(), parsed)),
        }
    }
    Ok(ZerosDataset { values, base, source_offset })
}

pub fn parse_zeros_file(path: impl AsRef<Path>, spec: &OffsetSpec) -> Result<ZerosDataset> {
    parse_zeros_str(&std::fs::read_to_string(path)?, spec)
}

fn smooth_count(g: f64) -> f64 {
    g / (2.0 * PI) * (g / (2.0 * PI * E)).ln() + 7.0 / 8.0
}

/// Unfolds by the smooth zero count. With a base `B`, levels are
/// `N̄(B + δ) - N̄(B)` evaluated without forming `B + δ`.
pub fn riemann_unfold(dataset: &ZerosDataset) -> Result<LineSpectrum> {
    let levels: Vec<f64> = match &dataset.base {
        None => {
            if let Some((i, g)) = dataset.values.iter().enumerate().find(|(_, g)| **g <= UNFOLD_THRESHOLD) {
                return Err(LlsError::Argument(format!(
                    "zero {} at {g} lies below the unfolding threshold 2πe",
                    dataset.source_offset + i as u64
                )));
            }
            dataset.values.iter().map(|&g| smooth_count(g)).collect()
        }
        Some((_, b)) => {
            let b = *b;
            if b + dataset.values[0] <= UNFOLD_THRESHOLD {
                return Err(LlsError::Argument("ordinates lie below the unfolding threshold 2πe".into()));
            }
            let slope = (b / (2.0 * PI * E)).ln();
            dataset
                .values
                .iter()
                .map(|&d| (d * slope + (b + d) * (d / b).ln_1p()) / (2.0 * PI))
                .collect()
        }
    };
    LineSpectrum::new(levels, Scale::Unfolded)
}

/// One value per line at 17 significant digits.
pub fn levels_csv(spectrum: &LineSpectrum) -> String {
    let mut s = String::new();
    for v in spectrum.levels() {
        let _ = writeln!(s, "{v:.16e}");
    }
    s
}
