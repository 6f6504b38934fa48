use crate::error::{invalid, Error, Result};
use crate::reduction::Reduction;

use super::instance::LpPackingInstance;

/// Drops every column holding an entry above `n / eps`. Such an item alone
/// overshoots any target near 1 by a factor the solver cannot absorb, and
/// excluding it costs at most an `O(eps)` loss.
pub fn preprocess_entry_bound(inst: &LpPackingInstance, eps: f64) -> Result<(LpPackingInstance, Reduction)> {
    if !(eps > 0.0) {
        return invalid(format!("accuracy eps = {eps} must be positive"));
    }
    let threshold = inst.n() as f64 / eps;
    let keep: Vec<bool> = (0..inst.n())
        .map(|i| inst.column(i).iter().all(|&x| x <= threshold))
        .collect();
    let reduction = Reduction::from_mask(&keep);
    if reduction.kept.is_empty() {
        return Err(Error::InfeasibleAfterPreprocessing);
    }
    if !reduction.removed.is_empty() {
        log::debug!("dropped {} columns above {threshold}", reduction.removed.len());
    }
    Ok((inst.select_columns(&reduction.kept), reduction))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn drops_large_column() {
        let inst = LpPackingInstance::new(array![[1.0, 100.0]]).unwrap();
        let (reduced, red) = preprocess_entry_bound(&inst, 0.1).unwrap();
        assert_eq!(red.removed, vec![1]);
        assert_eq!(reduced.n(), 1);
    }

    #[test]
    fn keeps_all_ones() {
        let inst = LpPackingInstance::new(Array2::ones((3, 4))).unwrap();
        let (reduced, red) = preprocess_entry_bound(&inst, 0.1).unwrap();
        assert!(red.is_identity());
        assert_eq!(reduced, inst);
    }

    #[test]
    fn everything_removed() {
        let inst = LpPackingInstance::new(array![[1000.0, 1000.0]]).unwrap();
        assert!(matches!(
            preprocess_entry_bound(&inst, 0.1),
            Err(Error::InfeasibleAfterPreprocessing)
        ));
    }
}
