use crate::error::{invalid, Error, Result};

use super::eigen::{symmetric_eigen, SpectralDecomposition};
use super::sym::SymMatrix;

/// Hölder conjugate `q = p / (p - 1)`, written as `1 + 1/(p - 1)` so large `p`
/// keeps full precision. `p = inf` maps to 1 and `p = 1` to infinity.
pub fn dual_exponent(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        1.0 + 1.0 / (p - 1.0)
    }
}

pub(crate) fn check_norm_order(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return invalid(format!("norm order must lie in [1, inf], got {p}"));
    }
    Ok(())
}

/// `l_p` norm of a vector, scaled by the max magnitude to avoid overflow at large `p`.
pub fn vector_pnorm(x: &[f64], p: f64) -> f64 {
    let max = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if max == 0.0 || p.is_infinite() {
        return max;
    }
    if p == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p == 2.0 {
        return x.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    let s: f64 = x.iter().map(|v| (v.abs() / max).powf(p)).sum();
    max * s.powf(1.0 / p)
}

/// Schatten-`p` norm of an already-computed spectrum.
pub fn schatten_norm_of_spectrum(eigenvalues: &[f64], p: f64) -> f64 {
    vector_pnorm(eigenvalues, p)
}

/// `(sum_j |lambda_j|^p)^{1/p}`, or `max_j |lambda_j|` for `p = inf`.
pub fn schatten_norm(m: &SymMatrix, p: f64) -> Result<f64> {
    check_norm_order(p)?;
    if !m.is_finite() {
        return invalid("matrix has non-finite entries");
    }
    let eig = symmetric_eigen(m);
    Ok(schatten_norm_of_spectrum(&eig.eigenvalues, p))
}

/// The unit dual-norm matrix `N` attaining `<N, M> = ||M||_p`:
/// `N = sum_j sign(lambda_j) |lambda_j|^{p-1} v_j v_j^T / ||M||_p^{p-1}`.
pub fn schatten_dual_witness(m: &SymMatrix, p: f64) -> Result<SymMatrix> {
    check_norm_order(p)?;
    if p.is_infinite() || p == 1.0 {
        return invalid("dual witness requires a finite order p > 1");
    }
    if !m.is_finite() {
        return invalid("matrix has non-finite entries");
    }
    let eig = symmetric_eigen(m);
    dual_witness_from_spectrum(&eig, p)
}

pub(crate) fn dual_witness_from_spectrum(eig: &SpectralDecomposition, p: f64) -> Result<SymMatrix> {
    let norm = schatten_norm_of_spectrum(&eig.eigenvalues, p);
    if norm == 0.0 {
        return Err(Error::DegenerateInput(
            "dual witness of the zero matrix is undefined".into(),
        ));
    }
    Ok(eig.map_spectrum(|l| l.signum() * (l.abs() / norm).powf(p - 1.0)))
}

/// Validates that `p` is an odd integer `>= 3` and returns it as an integer.
pub fn odd_order(p: f64) -> Result<u32> {
    if p.is_finite() && p >= 3.0 && p.fract() == 0.0 && (p as u64) % 2 == 1 && p < u32::MAX as f64 {
        Ok(p as u32)
    } else {
        Err(Error::UnsupportedOrder(p))
    }
}
