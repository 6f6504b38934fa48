//! Robust principal component analysis under adversarial corruption: the
//! trimmed one-dimensional variance estimator, the filtering algorithm, and
//! the nearly-linear pipeline built on boxed Schatten packing.

mod covariance;
mod downweight;
mod fast;
mod filter;
mod univariate;

pub use covariance::{naive_top_direction, weighted_covariance, DENSE_DIM_CAP};
pub use downweight::downweight;
pub use fast::{robust_pca_fast, score_candidates, CandidateSet, FastDiagnostics, RobustPcaConfig};
pub use filter::{pca_filter, FilterConfig, FilterOutcome, FilterState};
pub use univariate::{
    kept_count, one_d_robust_variance, robust_trace_estimate, squared_projections, trimmed_mean, UNIT_TOLERANCE,
};
