use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Tolerance on `sum w = 1` for simplex membership.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// Nonnegative weights over `n` items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return invalid("weight vector must be non-empty");
        }
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return invalid("weights must be finite and nonnegative");
        }
        Ok(Self(w))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub(crate) fn from_vec_unchecked(w: Vec<f64>) -> Self {
        Self(w)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn l1(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, &x| m.max(x))
    }

    /// Scales to unit `l1` norm; the zero vector is returned unchanged.
    pub fn normalized(&self) -> Self {
        let s = self.l1();
        if s == 0.0 {
            return self.clone();
        }
        Self(self.0.iter().map(|x| x / s).collect())
    }

    pub fn is_simplex(&self) -> bool {
        (self.l1() - 1.0).abs() <= SIMPLEX_TOLERANCE
    }

    /// Simplex member with every weight at most `1 / (n (1 - eps))`.
    pub fn is_truncated_simplex(&self, eps: f64) -> bool {
        let cap = 1.0 / (self.len() as f64 * (1.0 - eps));
        self.is_simplex() && self.0.iter().all(|&x| x <= cap * (1.0 + SIMPLEX_TOLERANCE))
    }

    /// Every weight at most `(1 + alpha) / n`.
    pub fn is_in_box(&self, alpha: f64) -> bool {
        let cap = (1.0 + alpha) / self.len() as f64;
        self.0.iter().all(|&x| x <= cap * (1.0 + SIMPLEX_TOLERANCE))
    }

    /// Places these weights at `kept` inside a zero vector of length `n`.
    pub fn reembed(&self, n: usize, kept: &[usize]) -> Self {
        let mut out = vec![0.0; n];
        for (&i, &x) in kept.iter().zip(&self.0) {
            out[i] = x;
        }
        Self(out)
    }
}
