//! Monte Carlo estimators for outage and error probabilities, eigenvalue
//! statistics and the distance bounds used in the achievability argument.

pub mod bounds;
pub mod chi2;
pub mod engine;
pub mod error_rate;
pub mod outage;
pub mod report;
pub mod slope;
pub mod wishart;

pub use bounds::{check_mismatched_bound, check_nvd_product_bound, NvdConstant, NvdReport};
pub use chi2::chi2_tail;
pub use engine::configure_threads_from_env;
pub use error_rate::{estimate_error_prob, min_received_distance, ErrorOptions};
pub use outage::estimate_outage;
pub use report::SimulationResult;
pub use slope::{fit_slope, SlopeEstimate, SlopeWeighting, MIN_EVENTS};
pub use wishart::{sample_wishart_quaternion, sample_wishart_real, EigenProfile};

/// Linear SNR from decibels.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
