use ndarray::{Array1, Array2, Axis};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{symmetric_eigen, SymMatrix};

use super::distribution::DistributionSpec;

/// How the adversary fills the replaced rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AdversaryStrategy {
    /// Every bad row is `magnitude * v / |v|`.
    DirectionSpike { direction: Vec<f64>, magnitude: f64 },
    /// Every bad row is `point`.
    ClusteredCopies { point: Vec<f64> },
    /// Each bad row is `scale` times a uniformly chosen good row.
    MirrorGood { scale: f64 },
    /// Bad indices are recorded but the rows are left as drawn.
    None,
}

/// Samples after corruption, with the ground truth needed for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptedDataset {
    pub samples: Array2<f64>,
    pub eps: f64,
    pub seed: u64,
    /// Replaced row indices, ascending.
    pub bad_indices: Vec<usize>,
    pub covariance: SymMatrix,
    pub proxy_scale: f64,
}

/// `ceil(eps n)`, computed so that exact products like `0.05 * 5000` do not
/// round up by one.
pub fn corrupted_count(n: usize, eps: f64) -> usize {
    (eps * n as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Replaces `ceil(eps n)` uniformly chosen rows of `samples` according to
/// `strategy`. The remaining rows are untouched.
pub fn corrupt(
    samples: Array2<f64>,
    spec: &DistributionSpec,
    eps: f64,
    strategy: &AdversaryStrategy,
    seed: u64,
) -> Result<CorruptedDataset> {
    let (n, d) = samples.dim();
    if d != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: d });
    }
    if !(0.0..1.0).contains(&eps) {
        return invalid(format!("corruption level eps = {eps} must lie in [0, 1)"));
    }
    let count = corrupted_count(n, eps);
    if count >= n {
        return invalid(format!("cannot replace {count} of {n} rows"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = index::sample(&mut rng, n, count).into_vec();
    bad.sort_unstable();

    let mut out = samples;
    match strategy {
        AdversaryStrategy::DirectionSpike { direction, magnitude } => {
            let v = unit(direction, d)?;
            fill(&mut out, &bad, &(v * *magnitude));
        }
        AdversaryStrategy::ClusteredCopies { point } => {
            if point.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: point.len() });
            }
            fill(&mut out, &bad, &Array1::from(point.clone()));
        }
        AdversaryStrategy::MirrorGood { scale } => {
            let mut is_bad = vec![false; n];
            bad.iter().for_each(|&i| is_bad[i] = true);
            let good: Vec<usize> = (0..n).filter(|&i| !is_bad[i]).collect();
            for &i in &bad {
                let src = good[rng.gen_range(0..good.len())];
                let row = out.row(src).to_owned() * *scale;
                out.row_mut(i).assign(&row);
            }
        }
        AdversaryStrategy::None => {}
    }
    Ok(CorruptedDataset {
        samples: out,
        eps,
        seed,
        bad_indices: bad,
        covariance: spec.covariance.clone(),
        proxy_scale: spec.proxy_scale,
    })
}

fn unit(v: &[f64], d: usize) -> Result<Array1<f64>> {
    if v.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: v.len() });
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return invalid("spike direction must be a nonzero finite vector");
    }
    Ok(Array1::from_iter(v.iter().map(|x| x / norm)))
}

fn fill(out: &mut Array2<f64>, rows: &[usize], value: &Array1<f64>) {
    for &i in rows {
        out.row_mut(i).assign(value);
    }
}

impl CorruptedDataset {
    pub fn n(&self) -> usize {
        self.samples.nrows()
    }

    pub fn d(&self) -> usize {
        self.samples.ncols()
    }

    pub fn bad_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n()];
        self.bad_indices.iter().for_each(|&i| mask[i] = true);
        mask
    }

    pub fn good_indices(&self) -> Vec<usize> {
        let mask = self.bad_mask();
        (0..self.n()).filter(|&i| !mask[i]).collect()
    }

    /// `u^T Sigma u / lambda_max(Sigma)` for a unit vector `u`.
    pub fn score(&self, u: &[f64]) -> f64 {
        let top = symmetric_eigen(&self.covariance).lambda_max();
        if top == 0.0 {
            return 1.0;
        }
        self.covariance.quad_form(u) / top
    }

    /// Differences of consecutive row pairs, `X_{2i} - X_{2i+1}`. The result has
    /// `floor(n/2)` rows and covariance `2 Sigma`; a pair is bad when either
    /// member was.
    pub fn pair_differences(&self) -> Self {
        let half = self.n() / 2;
        let mask = self.bad_mask();
        let even = self.samples.slice(ndarray::s![0..2 * half;2, ..]);
        let odd = self.samples.slice(ndarray::s![1..2 * half;2, ..]);
        let samples = &even - &odd;
        let bad_indices: Vec<usize> = (0..half).filter(|&i| mask[2 * i] || mask[2 * i + 1]).collect();
        let eps = if half == 0 { 0.0 } else { bad_indices.len() as f64 / half as f64 };
        Self {
            samples,
            eps,
            seed: self.seed,
            bad_indices,
            covariance: self.covariance.scaled(2.0),
            proxy_scale: self.proxy_scale,
        }
    }

    /// The good rows only.
    pub fn clean_samples(&self) -> Array2<f64> {
        self.samples.select(Axis(0), &self.good_indices())
    }
}
