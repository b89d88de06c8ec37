//! Local level spacing statistics for random-matrix, deterministic and
//! many-body spectra.

pub mod acceptance;
pub mod deterministic;
pub mod ensembles;
pub mod error;
pub mod linalg;
pub mod rng;
pub mod spacing;
pub mod statistics;
pub mod syk;
pub mod theory;

pub use error::{LlsError, Result};
