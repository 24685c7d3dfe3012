//! Sampling algorithms and their exact population counterparts.

pub(crate) mod learn;
pub mod lp;
mod monotonicity;
mod phi;
mod support;
mod uniformity;

pub use learn::{
    learn, learn_from_samples, learner_params, project_to_simplex, EstimateTable, LearnOutcome,
    LearnerOverrides, LearnerParams,
};
pub use monotonicity::{
    distance_to_monotone, test_monotonicity, DistanceOracle, ExactTvOracle, LpMonotoneDistance,
    MonotoneDistanceOracle, MonotonicityStep, MonotonicityVerdict, LP_MAX_DIM,
};
pub use phi::{interval_max, phi_exact, phi_hat, phi_hat_from_counts};
pub use support::{covered, estimate_support, plan_support, SupportEstimate, SupportOverrides, SupportPlan};
pub use uniformity::{
    distance_to_uniform_oracle, estimate_distance_to_uniform, plan_distance_to_uniform,
    UniformityEstimate, UniformityOverrides, UniformityPlan,
};

/// Formula sample counts are real; they are rounded up. `None` when the
/// count does not fit in 63 bits.
pub(crate) fn ceil_count(log2_value: f64) -> Option<u64> {
    if !log2_value.is_finite() || log2_value >= 63.0 {
        return None;
    }
    let v = libm::pow(2.0, log2_value);
    Some(libm::ceil(v) as u64)
}
