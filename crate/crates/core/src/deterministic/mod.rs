//! Deterministic spectra: rectangular billiards and zeta zeros.

mod billiard;
mod zeros;

pub use billiard::{
    billiard_levels, billiard_modes, rational_approximation, weyl_unfold, BilliardConfig, BilliardFamily,
    MIN_WINDOW_LEVELS,
};
pub use zeros::{
    levels_csv, parse_zeros_file, BUNDLED_ZEROS, parse_zeros_str, riemann_unfold, OffsetSpec, ZerosDataset, UNFOLD_THRESHOLD,
};
