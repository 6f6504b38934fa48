use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::eigen::symmetric_eigen;
use super::sym::SymMatrix;
use crate::error::{invalid, Error, Result};

/// An indexed collection of `n` PSD matrices `A_1, ..., A_n` of dimension `d`.
///
/// `RankOne` stores sample rows `X_i` and represents `A_i = X_i X_i^T` without
/// forming the matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PsdFamily {
    Dense(Vec<SymMatrix>),
    RankOne(Array2<f64>),
}

impl PsdFamily {
    /// Dense family; every matrix must be PSD up to `-tol * max|entry|`.
    pub fn dense(matrices: Vec<SymMatrix>, tol: f64) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return invalid("matrix family must be non-empty");
        };
        let d = first.dim();
        for (i, m) in matrices.iter().enumerate() {
            if m.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: m.dim(),
                });
            }
            let lmin = symmetric_eigen(m).lambda_min();
            if lmin < -tol * m.max_abs() {
                return invalid(format!("matrix {i} is not PSD: smallest eigenvalue {lmin}"));
            }
        }
        Ok(Self::Dense(matrices))
    }

    pub fn rank_one(samples: Array2<f64>) -> Result<Self> {
        if samples.nrows() == 0 || samples.ncols() == 0 {
            return invalid("sample matrix must be non-empty");
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return invalid("samples have non-finite entries");
        }
        Ok(Self::RankOne(samples))
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Dense(ms) => ms.len(),
            Self::RankOne(x) => x.nrows(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Dense(ms) => ms[0].dim(),
            Self::RankOne(x) => x.ncols(),
        }
    }

    /// `A_i` as a dense matrix.
    pub fn matrix(&self, i: usize) -> SymMatrix {
        match self {
            Self::Dense(ms) => ms[i].clone(),
            Self::RankOne(x) => SymMatrix::outer(&x.row(i).to_vec()),
        }
    }

    /// `sum_i w_i A_i`.
    pub fn combine(&self, w: &[f64]) -> SymMatrix {
        match self {
            Self::Dense(ms) => {
                let mut out = SymMatrix::zeros(self.dim());
                for (m, &wi) in ms.iter().zip(w) {
                    if wi != 0.0 {
                        out.add_scaled(wi, m);
                    }
                }
                out
            }
            Self::RankOne(x) => {
                let mut scaled = x.clone();
                for (mut row, &wi) in scaled.outer_iter_mut().zip(w) {
                    row *= wi;
                }
                SymMatrix::symmetrized(x.t().dot(&scaled))
            }
        }
    }

    /// `<A_i, Y>` for every `i`.
    pub fn inner_all(&self, y: &SymMatrix) -> Vec<f64> {
        match self {
            Self::Dense(ms) => ms.iter().map(|m| m.inner(y)).collect(),
            Self::RankOne(x) => {
                let xy = x.dot(&y.as_array());
                xy.outer_iter()
                    .zip(x.outer_iter())
                    .map(|(a, b)| a.dot(&b))
                    .collect()
            }
        }
    }

    /// `sum_l b_l^T A_i b_l` for every `i`, over the columns `b_l` of a `d x k` block.
    pub fn quad_forms_block(&self, b: ArrayView2<'_, f64>) -> Vec<f64> {
        match self {
            Self::Dense(ms) => ms
                .iter()
                .map(|m| {
                    let mb = m.as_array().dot(&b);
                    mb.iter().zip(b.iter()).map(|(p, q)| p * q).sum()
                })
                .collect(),
            Self::RankOne(x) => {
                let xb = x.dot(&b);
                xb.outer_iter().map(|r| r.dot(&r)).collect()
            }
        }
    }

    pub fn trace(&self, i: usize) -> f64 {
        match self {
            Self::Dense(ms) => ms[i].trace(),
            Self::RankOne(x) => x.row(i).dot(&x.row(i)),
        }
    }

    /// Largest eigenvalue of `A_i`; exact for rank-one members.
    pub fn lambda_max(&self, i: usize) -> f64 {
        match self {
            Self::Dense(ms) => symmetric_eigen(&ms[i]).lambda_max(),
            Self::RankOne(_) => self.trace(i),
        }
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        match self {
            Self::Dense(ms) => Self::Dense(indices.iter().map(|&i| ms[i].clone()).collect()),
            Self::RankOne(x) => Self::RankOne(x.select(ndarray::Axis(0), indices)),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        match self {
            Self::Dense(ms) => Self::Dense(ms.iter().map(|m| m.scaled(c)).collect()),
            Self::RankOne(x) => Self::RankOne(x * c.sqrt()),
        }
    }
}
