use crate::error::{invalid, Error, Result};
use crate::reduction::Reduction;

use super::instance::SdpPackingInstance;

/// Removes every matrix whose largest eigenvalue exceeds `n / eps`.
pub fn preprocess_spectral_bound(inst: &SdpPackingInstance, eps: f64) -> Result<(SdpPackingInstance, Reduction)> {
    if !(eps > 0.0) {
        return invalid(format!("accuracy eps = {eps} must be positive"));
    }
    let threshold = inst.n() as f64 / eps;
    let keep: Vec<bool> = (0..inst.n()).map(|i| inst.family().lambda_max(i) <= threshold).collect();
    let reduction = Reduction::from_mask(&keep);
    if reduction.kept.is_empty() {
        return Err(Error::InfeasibleAfterPreprocessing);
    }
    if reduction.is_identity() {
        return Ok((inst.clone(), reduction));
    }
    log::debug!("dropped {} matrices with spectral norm above {threshold}", reduction.removed.len());
    Ok((inst.subset(&reduction.kept), reduction))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;

    #[test]
    fn removes_large_matrix() {
        let eps = 0.1;
        let inst = SdpPackingInstance::new(vec![SymMatrix::identity(2), SymMatrix::identity(2).scaled(2.0 * 2.0 / eps)]).unwrap();
        let (reduced, red) = preprocess_spectral_bound(&inst, eps).unwrap();
        assert_eq!(red.removed, vec![1]);
        assert_eq!(reduced.n(), 1);
    }

    #[test]
    fn small_spectra_unchanged() {
        let inst = SdpPackingInstance::new(vec![SymMatrix::identity(3), SymMatrix::from_diag(&[1.0, 0.5, 0.0])]).unwrap();
        let (reduced, red) = preprocess_spectral_bound(&inst, 0.1).unwrap();
        assert!(red.is_identity());
        assert_eq!(reduced, inst);
    }
}
