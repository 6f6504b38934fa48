use ndarray::ArrayView2;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, SymMatrix};

/// Largest dimension for which [`weighted_covariance`] materializes `M(w)`.
pub const DENSE_DIM_CAP: usize = 512;

/// `M(w) = sum_i w_i X_i X_i^T` as a dense matrix.
pub fn weighted_covariance(samples: ArrayView2<'_, f64>, w: &[f64]) -> Result<SymMatrix> {
    let (n, d) = samples.dim();
    if w.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: w.len() });
    }
    if d > DENSE_DIM_CAP {
        return Err(Error::DenseCapExceeded { dim: d, cap: DENSE_DIM_CAP });
    }
    let mut scaled = samples.to_owned();
    for (mut row, &wi) in scaled.outer_iter_mut().zip(w) {
        row *= wi;
    }
    Ok(SymMatrix::symmetrized(samples.t().dot(&scaled)))
}

/// Top eigenvector of the uniformly weighted empirical covariance, the
/// non-robust baseline.
pub fn naive_top_direction(samples: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    let n = samples.nrows();
    if n == 0 {
        return Err(Error::InvalidInput("dataset is empty".into()));
    }
    let m = weighted_covariance(samples, &vec![1.0 / n as f64; n])?;
    Ok(symmetric_eigen(&m).eigenvector(0).to_vec())
}
