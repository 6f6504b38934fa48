use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{symmetric_eigen, SymMatrix};

/// Relative eigenvalue floor below which a covariance is rejected as non-PSD.
pub const COVARIANCE_PSD_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Gaussian,
    /// Independent Rademacher coordinates rotated by `Sigma^{1/2}`.
    BoundedRademacherMixture,
}

/// A mean-zero sub-Gaussian distribution with covariance `covariance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub covariance: SymMatrix,
    pub family: Family,
    /// Sub-Gaussian proxy is `proxy_scale * covariance`.
    pub proxy_scale: f64,
}

impl DistributionSpec {
    pub fn new(covariance: SymMatrix, family: Family, proxy_scale: f64) -> Result<Self> {
        if !covariance.is_finite() {
            return invalid("covariance has non-finite entries");
        }
        let eig = symmetric_eigen(&covariance);
        let floor = -COVARIANCE_PSD_TOLERANCE * eig.lambda_max().abs().max(1.0);
        if eig.lambda_min() < floor {
            return invalid(format!("covariance is not PSD: smallest eigenvalue {}", eig.lambda_min()));
        }
        if !(proxy_scale >= 1.0) {
            return invalid(format!("proxy scale {proxy_scale} must be at least 1"));
        }
        Ok(Self {
            covariance,
            family,
            proxy_scale,
        })
    }

    pub fn gaussian(covariance: SymMatrix) -> Result<Self> {
        Self::new(covariance, Family::Gaussian, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.covariance.dim()
    }

    /// Largest eigenvalue of the covariance.
    pub fn top_eigenvalue(&self) -> f64 {
        symmetric_eigen(&self.covariance).lambda_max()
    }

    /// `Sigma^{1/2}`, with negative rounding noise in the spectrum clamped to zero.
    pub fn square_root(&self) -> SymMatrix {
        symmetric_eigen(&self.covariance).map_spectrum(|l| l.max(0.0).sqrt())
    }
}

/// `rest I + (top - rest) sum_{j < rank} e_j e_j^T`, Gaussian family.
pub fn make_spiked_covariance(d: usize, top: f64, rest: f64, rank: usize) -> Result<DistributionSpec> {
    if d == 0 || rank > d {
        return invalid(format!("spike rank {rank} must lie in [0, {d}] with d positive"));
    }
    if !(rest > 0.0 && top >= rest) {
        return invalid(format!("need top >= rest > 0, got top = {top}, rest = {rest}"));
    }
    let diag: Vec<f64> = (0..d).map(|j| if j < rank { top } else { rest }).collect();
    DistributionSpec::gaussian(SymMatrix::from_diag(&diag))
}

/// `n` i.i.d. draws from `spec`, one per row.
pub fn sample_dataset(spec: &DistributionSpec, n: usize, seed: u64) -> Result<Array2<f64>> {
    if n == 0 {
        return invalid("sample count must be positive");
    }
    let d = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = match spec.family {
        Family::Gaussian => Array2::from_shape_fn((n, d), |_| rng.sample::<f64, _>(StandardNormal)),
        Family::BoundedRademacherMixture => {
            Array2::from_shape_fn((n, d), |_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
        }
    };
    Ok(z.dot(&spec.square_root().as_array()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spiked_spectrum() {
        let s = make_spiked_covariance(20, 10.0, 1.0, 3).unwrap();
        let eig = symmetric_eigen(&s.covariance).eigenvalues;
        assert_eq!(eig.iter().filter(|&&l| l == 10.0).count(), 3);
        assert_eq!(eig[3], 1.0);
        let iso = make_spiked_covariance(4, 2.0, 2.0, 1).unwrap();
        assert_eq!(iso.covariance, SymMatrix::identity(4).scaled(2.0));
        assert!(make_spiked_covariance(4, 0.5, 1.0, 1).is_err());
    }

    #[test]
    fn zero_covariance_gives_zero_rows() {
        let spec = DistributionSpec::gaussian(SymMatrix::zeros(3)).unwrap();
        let x = sample_dataset(&spec, 5, 1).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_indefinite() {
        assert!(DistributionSpec::gaussian(SymMatrix::from_diag(&[1.0, -0.1])).is_err());
    }

    #[test]
    fn deterministic() {
        let spec = make_spiked_covariance(3, 4.0, 1.0, 1).unwrap();
        assert_eq!(sample_dataset(&spec, 10, 7).unwrap(), sample_dataset(&spec, 10, 7).unwrap());
        assert_ne!(sample_dataset(&spec, 10, 7).unwrap(), sample_dataset(&spec, 10, 8).unwrap());
    }
}
