use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Dense real symmetric matrix.
///
/// Entries are symmetrized on construction (`(A + A^T) / 2`), so
/// `get(i, j) == get(j, i)` holds bitwise for every stored matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    data: Array2<f64>,
}

impl SymMatrix {
    /// Builds a symmetric matrix from a square array, averaging it with its
    /// transpose. Rejects non-square or non-finite input.
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let (r, c) = data.dim();
        if r != c {
            return invalid(format!("symmetric matrix must be square, got {r}x{c}"));
        }
        if r == 0 {
            return invalid("symmetric matrix must have positive dimension");
        }
        if data.iter().any(|x| !x.is_finite()) {
            return invalid("matrix has non-finite entries");
        }
        Ok(Self::symmetrized(data))
    }

    pub(crate) fn symmetrized(mut data: Array2<f64>) -> Self {
        let d = data.nrows();
        for i in 0..d {
            for j in (i + 1)..d {
                let avg = 0.5 * (data[[i, j]] + data[[j, i]]);
                data[[i, j]] = avg;
                data[[j, i]] = avg;
            }
        }
        Self { data }
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            data: Array2::zeros((d, d)),
        }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            data: Array2::eye(d),
        }
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        Self {
            data: Array2::from_diag(&Array1::from(diag.to_vec())),
        }
    }

    /// `v v^T`.
    pub fn outer(v: &[f64]) -> Self {
        let d = v.len();
        let mut data = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                data[[i, j]] = v[i] * v[j];
            }
        }
        Self { data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        let mut data = Array2::zeros((d, d));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                data[[i, j]] = x;
            }
        }
        Self::new(data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[[i, j]]
    }

    pub fn as_array(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.matvec_into(v, &mut out);
        out
    }

    pub fn matvec_into(&self, v: &[f64], out: &mut [f64]) {
        let d = self.dim();
        for i in 0..d {
            let row = self.data.row(i);
            let mut acc = 0.0;
            for j in 0..d {
                acc += row[j] * v[j];
            }
            out[i] = acc;
        }
    }

    /// `v^T A v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            let row = self.data.row(i);
            let mut r = 0.0;
            for j in 0..d {
                r += row[j] * v[j];
            }
            acc += v[i] * r;
        }
        acc
    }

    /// Frobenius inner product `<A, B> = Tr(AB)`.
    pub fn inner(&self, other: &SymMatrix) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn trace(&self) -> f64 {
        self.data.diag().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            data: &self.data * c,
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: f64, other: &SymMatrix) {
        self.data.scaled_add(c, &other.data);
    }

    /// `self += c * v v^T`.
    pub fn add_outer(&mut self, c: f64, v: &[f64]) {
        let d = self.dim();
        for i in 0..d {
            let ci = c * v[i];
            for j in 0..d {
                self.data[[i, j]] += ci * v[j];
            }
        }
    }

    pub fn sub(&self, other: &SymMatrix) -> Self {
        Self {
            data: &self.data - &other.data,
        }
    }

    /// Plain matrix product; the result is symmetric only when the factors commute.
    pub fn matmul(&self, other: &SymMatrix) -> Array2<f64> {
        self.data.dot(&other.data)
    }
}
