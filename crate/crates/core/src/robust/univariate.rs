use ndarray::{ArrayView1, ArrayView2};

use crate::error::{invalid, Error, Result};

/// Deviation from unit length tolerated in direction arguments.
pub const UNIT_TOLERANCE: f64 = 1e-8;

/// Number of projections kept by the trimmed mean, `floor((1 - 2 eps) n)`.
pub fn kept_count(n: usize, eps: f64) -> usize {
    ((1.0 - 2.0 * eps) * n as f64 + 1e-9).floor() as usize
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..0.5).contains(&eps) {
        return invalid(format!("corruption level eps = {eps} must lie in [0, 1/2)"));
    }
    Ok(())
}

/// Mean of the smallest `floor((1 - 2 eps) n)` entries of `scores`.
///
/// The scores are fully sorted before summation so the result does not depend
/// on their order.
pub fn trimmed_mean(scores: &[f64], eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let keep = kept_count(scores.len(), eps);
    if keep == 0 {
        return invalid(format!("no samples survive trimming: n = {}, eps = {eps}", scores.len()));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[..keep].iter().sum::<f64>() / keep as f64)
}

/// `<X_i, u>^2` for every row of `samples`.
pub fn squared_projections(samples: ArrayView2<'_, f64>, u: &[f64]) -> Result<Vec<f64>> {
    if u.len() != samples.ncols() {
        return Err(Error::DimensionMismatch {
            expected: samples.ncols(),
            got: u.len(),
        });
    }
    Ok(samples.dot(&ArrayView1::from(u)).iter().map(|x| x * x).collect())
}

/// Robust estimate of `u^T Sigma u`: projects every sample onto the unit
/// vector `u`, discards the `2 eps` fraction with the largest squared
/// projection, and averages the rest.
pub fn one_d_robust_variance(samples: ArrayView2<'_, f64>, u: &[f64], eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOLERANCE {
        return invalid(format!("direction must be a unit vector, got norm {norm}"));
    }
    trimmed_mean(&squared_projections(samples, u)?, eps)
}

/// Sum of the robust variances along the coordinate axes, a constant-factor
/// estimate of the trace of the covariance.
pub fn robust_trace_estimate(samples: ArrayView2<'_, f64>, eps: f64) -> Result<f64> {
    let mut total = 0.0;
    for col in samples.columns() {
        let scores: Vec<f64> = col.iter().map(|x| x * x).collect();
        total += trimmed_mean(&scores, eps)?;
    }
    Ok(total)
}
