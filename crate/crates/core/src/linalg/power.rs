use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::eigen::symmetric_eigen;
use super::operator::SymOperator;
use super::sym::SymMatrix;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    /// Multiplier in the application cap `ceil(c_pow * p * ln d / eps_tilde)`.
    pub c_pow: f64,
    /// Target failure probability of the random start.
    pub confidence: f64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            c_pow: 10.0,
            confidence: 1e-2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PowerResult {
    /// `d x t`, orthonormal columns ordered by descending Ritz value.
    pub vectors: Array2<f64>,
    /// Rayleigh quotients `z_j^T A z_j`.
    pub ritz_values: Vec<f64>,
    pub applications: usize,
}

impl PowerResult {
    pub fn vector(&self, j: usize) -> Vec<f64> {
        self.vectors.column(j).to_vec()
    }
}

/// Block power iteration on a symmetric PSD operator, returning `t` orthonormal
/// vectors whose quadratic forms under `A^p` and `A^{p-1}` approximate the top
/// `t` eigenvalue powers to relative accuracy `eps_tilde`.
///
/// Applications run in chunks of `p(p-1)` followed by a Rayleigh-Ritz
/// rotation. The loop stops once at least
/// `(ln d + ln(1/confidence)) / eps_tilde` applications have run and the Ritz
/// values have settled to within `eps_tilde / (4p)` between chunks.
pub fn simultaneous_power_iteration(
    op: &dyn SymOperator,
    t: usize,
    p: u32,
    eps_tilde: f64,
    seed: u64,
    cfg: &PowerConfig,
) -> Result<PowerResult> {
    let d = op.dim();
    if t == 0 || t > d {
        return invalid(format!("rank t = {t} must lie in [1, {d}]"));
    }
    if !(eps_tilde > 0.0 && eps_tilde < 1.0) {
        return invalid(format!("eps_tilde = {eps_tilde} must lie in (0, 1)"));
    }
    if p == 0 {
        return invalid("power p must be positive");
    }
    if !(cfg.confidence > 0.0 && cfg.confidence < 1.0) || !(cfg.c_pow > 0.0) {
        return invalid("power iteration config out of range");
    }

    let chunk = ((p as usize) * (p as usize - 1)).max(1);
    let ln_d = (d.max(2) as f64).ln();
    let round_up = |x: usize| x.div_ceil(chunk) * chunk;
    let min_apps = round_up(((ln_d + (1.0 / cfg.confidence).ln()) / eps_tilde).ceil() as usize);
    let cap = round_up((cfg.c_pow * p as f64 * ln_d / eps_tilde).ceil() as usize).max(min_apps + chunk);
    let settle = eps_tilde / (4.0 * p as f64);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = Array2::from_shape_fn((d, t), |_| StandardNormal.sample(&mut rng));
    orthonormalize(&mut z, &mut rng);

    let mut applications = 0;
    let mut previous: Option<Vec<f64>> = None;
    loop {
        for _ in 0..chunk {
            z = op.apply_block(z.view());
            orthonormalize(&mut z, &mut rng);
        }
        applications += chunk;
        let (rotated, ritz) = rayleigh_ritz(op, z.view());
        z = rotated;

        let settled = previous.as_ref().is_some_and(|prev| {
            let scale = ritz[0].abs().max(f64::MIN_POSITIVE);
            prev.iter()
                .zip(&ritz)
                .all(|(a, b)| (a - b).abs() <= settle * b.abs().max(1e-14 * scale))
        });
        if applications >= min_apps && settled {
            return Ok(PowerResult {
                vectors: z,
                ritz_values: ritz,
                applications,
            });
        }
        if applications >= cap {
            log::warn!("power iteration hit its cap of {cap} applications");
            return Err(Error::ConvergenceFailure {
                applications,
                partial: (0..t).map(|j| z.column(j).to_vec()).collect(),
            });
        }
        previous = Some(ritz);
    }
}

fn rayleigh_ritz(op: &dyn SymOperator, z: ArrayView2<'_, f64>) -> (Array2<f64>, Vec<f64>) {
    let az = op.apply_block(z);
    let h = z.t().dot(&az);
    let eig = symmetric_eigen(&SymMatrix::symmetrized(h));
    (z.dot(&eig.eigenvectors), eig.eigenvalues)
}

/// Twice-iterated modified Gram-Schmidt. Columns that collapse numerically are
/// replaced by fresh random directions orthogonal to the earlier ones.
pub(crate) fn orthonormalize(z: &mut Array2<f64>, rng: &mut ChaCha8Rng) {
    let (d, t) = z.dim();
    for j in 0..t {
        let mut attempts = 0;
        loop {
            let original = column_norm(z, j);
            for _ in 0..2 {
                for k in 0..j {
                    let dot: f64 = (0..d).map(|i| z[[i, k]] * z[[i, j]]).sum();
                    for i in 0..d {
                        z[[i, j]] -= dot * z[[i, k]];
                    }
                }
            }
            let norm = column_norm(z, j);
            if norm > 1e-10 * original && norm > 1e-300 {
                for i in 0..d {
                    z[[i, j]] /= norm;
                }
                break;
            }
            attempts += 1;
            if attempts > 8 {
                // d >= t guarantees a complement exists; fall back to a basis vector.
                for i in 0..d {
                    z[[i, j]] = if i == j { 1.0 } else { 0.0 };
                }
                continue;
            }
            for i in 0..d {
                z[[i, j]] = StandardNormal.sample(rng);
            }
        }
    }
}

fn column_norm(z: &Array2<f64>, j: usize) -> f64 {
    z.column(j).iter().map(|x| x * x).sum::<f64>().sqrt()
}
