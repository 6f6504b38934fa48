//! Cyclic Jacobi eigensolver for dense symmetric matrices.
//!
//! Jacobi is slow asymptotically but accurate to machine precision on the
//! small dense matrices this crate works with, and it warm-starts well: a
//! matrix that is already nearly diagonal in a known basis converges in one
//! or two sweeps. The packing solvers rely on that to re-diagonalize
//! `sum_i w_i A_i` every iteration.

use ndarray::{Array2, ArrayView1, ArrayView2};

use super::sym::SymMatrix;

/// Off-diagonal mass (relative to the Frobenius norm) at which a sweep stops.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted descending with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `j` is the eigenvector for `eigenvalues[j]`.
    pub eigenvectors: Array2<f64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, j: usize) -> ArrayView1<'_, f64> {
        self.eigenvectors.column(j)
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// `sum_j f(lambda_j) v_j v_j^T`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let d = self.dim();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        let mut out = Array2::zeros((d, d));
        for i in 0..d {
            for k in i..d {
                let mut acc = 0.0;
                for j in 0..d {
                    acc += fl[j] * v[[i, j]] * v[[k, j]];
                }
                out[[i, k]] = acc;
                out[[k, i]] = acc;
            }
        }
        SymMatrix::symmetrized(out)
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.map_spectrum(|l| l)
    }
}

/// Full eigendecomposition by cyclic Jacobi rotations.
pub fn symmetric_eigen(m: &SymMatrix) -> SpectralDecomposition {
    let d = m.dim();
    let a = m.as_array().to_owned();
    let v = Array2::eye(d);
    jacobi_in_place(a, v)
}

/// Eigendecomposition warm-started from an orthonormal `basis` that
/// approximately diagonalizes `m` (typically the eigenvectors of the previous
/// iterate). The result is identical in contract to [`symmetric_eigen`].
pub fn symmetric_eigen_warm(m: &SymMatrix, basis: ArrayView2<'_, f64>) -> SpectralDecomposition {
    let rotated = basis.t().dot(&m.as_array()).dot(&basis);
    jacobi_in_place(rotated, basis.to_owned())
}

fn jacobi_in_place(mut a: Array2<f64>, mut v: Array2<f64>) -> SpectralDecomposition {
    let d = a.nrows();
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = JACOBI_TOLERANCE * total;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off += a[[p, q]] * a[[p, q]];
            }
        }
        if (2.0 * off).sqrt() <= threshold || off == 0.0 {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                a[[p, q]] = 0.0;
                a[[q, p]] = 0.0;
                for k in 0..d {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    let diag: Vec<f64> = (0..d).map(|i| a[[i, i]]).collect();
    // Stable sort: equal eigenvalues keep their rotation order.
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap_or(std::cmp::Ordering::Equal));

    let mut eigenvalues = Vec::with_capacity(d);
    let mut eigenvectors = Array2::zeros((d, d));
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(diag[src]);
        let col = v.column(src);
        let sign = first_significant_sign(col);
        for k in 0..d {
            eigenvectors[[k, dst]] = sign * col[k];
        }
    }
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Sign making the first coordinate of magnitude above 1e-12 positive.
fn first_significant_sign(col: ArrayView1<'_, f64>) -> f64 {
    for &x in col.iter() {
        if x.abs() > 1e-12 {
            return x.signum();
        }
    }
    1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(d: usize, seed: u64) -> SymMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Array2::from_shape_fn((d, d), |_| rng.gen_range(-1.0..1.0));
        SymMatrix::new(a).unwrap()
    }

    #[test]
    fn reconstructs_and_is_orthonormal() {
        for seed in 0..20 {
            let m = random_sym(1 + (seed as usize % 9), seed);
            let eig = symmetric_eigen(&m);
            let rec = eig.reconstruct();
            let rel = rec.sub(&m).frobenius_norm() / m.frobenius_norm().max(1e-300);
            assert!(rel < 1e-8, "relative reconstruction error {rel}");
            let vtv = eig.eigenvectors.t().dot(&eig.eigenvectors);
            let d = m.dim();
            for i in 0..d {
                for j in 0..d {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((vtv[[i, j]] - expect).abs() < 1e-8);
                }
            }
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn diagonal_input_sorted_descending() {
        let m = SymMatrix::from_diag(&[1.0, 3.0, 2.0]);
        let eig = symmetric_eigen(&m);
        assert_eq!(eig.eigenvalues, vec![3.0, 2.0, 1.0]);
        assert_eq!(eig.eigenvector(0)[1], 1.0);
    }

    #[test]
    fn warm_start_matches_cold() {
        let m = random_sym(8, 3);
        let cold = symmetric_eigen(&m);
        let m2 = {
            let mut x = m.clone();
            x.add_scaled(1e-3, &random_sym(8, 4));
            x
        };
        let warm = symmetric_eigen_warm(&m2, cold.eigenvectors.view());
        let fresh = symmetric_eigen(&m2);
        for (a, b) in warm.eigenvalues.iter().zip(&fresh.eigenvalues) {
            assert!((a - b).abs() < 1e-10);
        }
        let rec = warm.reconstruct();
        assert!(rec.sub(&m2).frobenius_norm() < 1e-9);
    }

    #[test]
    fn sign_convention_first_nonzero_positive() {
        let m = random_sym(5, 11);
        let eig = symmetric_eigen(&m);
        for j in 0..5 {
            let col = eig.eigenvector(j);
            let first = col.iter().find(|x| x.abs() > 1e-12).unwrap();
            assert!(*first > 0.0);
        }
    }
}
