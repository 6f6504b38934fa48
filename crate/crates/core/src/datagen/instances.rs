use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::linalg::SymMatrix;
use crate::lp::LpPackingInstance;
use crate::sdp::SdpPackingInstance;

/// `d x n` matrix with i.i.d. entries uniform on `[0, scale)`.
pub fn random_lp_instance(n: usize, d: usize, scale: f64, seed: u64) -> Result<LpPackingInstance> {
    if n == 0 || d == 0 || !(scale > 0.0 && scale.is_finite()) {
        return invalid("random LP needs positive n, d and scale");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    LpPackingInstance::new(Array2::from_shape_fn((d, n), |_| rng.gen::<f64>() * scale))
}

/// `n` matrices `scale G G^T / rank` with `G` a `d x rank` standard Gaussian.
pub fn random_sdp_instance(n: usize, d: usize, rank: usize, scale: f64, seed: u64) -> Result<SdpPackingInstance> {
    if n == 0 || d == 0 || rank == 0 || !(scale > 0.0 && scale.is_finite()) {
        return invalid("random SDP needs positive n, d, rank and scale");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let matrices = (0..n)
        .map(|_| {
            let g = Array2::from_shape_fn((d, rank), |_| rng.sample::<f64, _>(StandardNormal));
            SymMatrix::new(g.dot(&g.t()) * (scale / rank as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    SdpPackingInstance::new(matrices)
}
