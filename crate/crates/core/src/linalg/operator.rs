use ndarray::{Array2, ArrayView1, ArrayView2};

use super::sym::SymMatrix;
use crate::error::{Error, Result};

/// A symmetric linear map on `R^d`, available only through products.
pub trait SymOperator {
    fn dim(&self) -> usize;

    fn apply_into(&self, v: &[f64], out: &mut [f64]);

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(v, &mut out);
        out
    }

    /// Applies the operator to every column of a `d x k` block.
    fn apply_block(&self, block: ArrayView2<'_, f64>) -> Array2<f64> {
        let (d, k) = block.dim();
        let mut out = Array2::zeros((d, k));
        let mut col = vec![0.0; d];
        let mut res = vec![0.0; d];
        for j in 0..k {
            for i in 0..d {
                col[i] = block[[i, j]];
            }
            self.apply_into(&col, &mut res);
            for i in 0..d {
                out[[i, j]] = res[i];
            }
        }
        out
    }
}

impl SymOperator for SymMatrix {
    fn dim(&self) -> usize {
        SymMatrix::dim(self)
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        self.matvec_into(v, out)
    }

    fn apply_block(&self, block: ArrayView2<'_, f64>) -> Array2<f64> {
        self.as_array().dot(&block)
    }
}

/// `v -> sum_i w_i X_i <X_i, v>` over the rows `X_i` of a sample matrix,
/// evaluated in `O(nd)` per product without forming the `d x d` matrix.
pub struct WeightedGram<'a> {
    samples: ArrayView2<'a, f64>,
    weights: &'a [f64],
}

impl<'a> WeightedGram<'a> {
    pub fn new(samples: ArrayView2<'a, f64>, weights: &'a [f64]) -> Result<Self> {
        if samples.nrows() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: samples.nrows(),
                got: weights.len(),
            });
        }
        Ok(Self { samples, weights })
    }
}

impl SymOperator for WeightedGram<'_> {
    fn dim(&self) -> usize {
        self.samples.ncols()
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        let v = ArrayView1::from(v);
        let proj = self.samples.dot(&v);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, row) in self.samples.outer_iter().enumerate() {
            let c = self.weights[i] * proj[i];
            if c == 0.0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(row.iter()) {
                *o += c * x;
            }
        }
    }

    fn apply_block(&self, block: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut proj = self.samples.dot(&block);
        for (i, mut row) in proj.outer_iter_mut().enumerate() {
            row *= self.weights[i];
        }
        self.samples.t().dot(&proj)
    }
}

/// `sum_i w_i X_i <X_i, v>` for the rows `X_i` of `samples`.
pub fn weighted_gram_apply<'a>(samples: ArrayView2<'a, f64>, w: &'a [f64], v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != samples.ncols() {
        return Err(Error::DimensionMismatch {
            expected: samples.ncols(),
            got: v.len(),
        });
    }
    Ok(WeightedGram::new(samples, w)?.apply(v))
}
