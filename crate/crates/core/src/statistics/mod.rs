//! Monte Carlo protocols and the statistics built on their output.

mod accumulator;
mod histogram;
mod protocols;
mod ratios;

pub use accumulator::{RunningStats, SpacingRow, SpacingStats, Z99};
pub use histogram::{
    histogram_p0, histogram_spacings, ks_one_sample, ks_two_sample, origin_power_law, Histogram, PowerLawFit,
    DEFAULT_BINS, DEFAULT_S_MAX, MIN_P0_RECORDS,
};
pub use protocols::{
    min_separation, protocol1, protocol2_param, protocol2_points, spaced_reference_points, SampleSource, Workers,
    CHUNK, MAX_SAMPLE_FAILURE, MAX_SKIP_FRACTION, THREADS_ENV,
};
pub use ratios::{covariance_from_means, local_r_stats, ratios, ratios_multi_point, LagEstimate, LocalRStats, R_BINS, R_MAX};

/// `|a - b|` within the joint 99% interval of two independent estimates.
pub fn agree_within_joint_ci(a: f64, se_a: f64, b: f64, se_b: f64) -> bool {
    (a - b).abs() <= Z99 * (se_a * se_a + se_b * se_b).sqrt()
}
