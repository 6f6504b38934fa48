use crate::error::{invalid, Error, Result};
use crate::weights::WeightVector;

/// Soft filter step: `w_i <- (1 - a_i / a_max) w_i` on the `active` indices,
/// where `a_max` is the largest score among them. Other weights are left
/// unchanged and the top-scoring active index is set to zero.
///
/// A zero `a_max` leaves the weights untouched.
pub fn downweight(weights: &WeightVector, scores: &[f64], active: &[usize]) -> Result<WeightVector> {
    let n = weights.len();
    if scores.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: scores.len() });
    }
    if let Some(&i) = active.iter().find(|&&i| i >= n) {
        return invalid(format!("active index {i} out of range for {n} weights"));
    }
    if active.iter().any(|&i| !(scores[i] >= 0.0 && scores[i].is_finite())) {
        return invalid("scores must be finite and nonnegative");
    }
    let Some(&top) = active.iter().max_by(|&&a, &&b| scores[a].total_cmp(&scores[b]).then(b.cmp(&a))) else {
        return Ok(weights.clone());
    };
    let a_max = scores[top];
    if a_max == 0.0 {
        log::warn!("downweight skipped: every active score is zero");
        return Ok(weights.clone());
    }
    let mut w = weights.as_slice().to_vec();
    for &i in active {
        w[i] *= 1.0 - scores[i] / a_max;
    }
    w[top] = 0.0;
    Ok(WeightVector::from_vec_unchecked(w))
}
