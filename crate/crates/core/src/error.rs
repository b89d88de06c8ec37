use std::fmt;

use thiserror::Error;

/// Which side of a reference point ran out of levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowSide {
    Below,
    Above,
}

impl fmt::Display for WindowSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowSide::Below => f.write_str("below"),
            WindowSide::Above => f.write_str("above"),
        }
    }
}

#[derive(Debug, Error)]
pub enum LlsError {
    #[error("degenerate reference point: phi = {phi} coincides with level {index}")]
    DegenerateReference { phi: f64, index: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("window underflow {side} the reference point: need {needed} level(s), found {found}")]
    WindowUnderflow {
        side: WindowSide,
        needed: usize,
        found: usize,
    },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("sampler failure (seed {seed}): {reason}")]
    SamplerFailure { seed: u64, reason: String },

    #[error("insufficient levels: {found} in window, at least {needed} required")]
    InsufficientLevels { found: usize, needed: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("solver error at t = {location}: {message}")]
    Solver { location: f64, message: String },

    #[error("precision loss: {0}")]
    Precision(String),

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("run failed: {failed} of {total} samples could not be used ({reason})")]
    RunFailed {
        failed: usize,
        total: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LlsError>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(LlsError::Argument(msg.into()))
}
