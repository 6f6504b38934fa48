use crate::outcome::{SolveOutcome, Verdict};

/// Bookkeeping for items dropped before solving, so primal points can be
/// mapped back to the original index space.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub original_len: usize,
    pub kept: Vec<usize>,
    pub removed: Vec<usize>,
}

impl Reduction {
    pub(crate) fn from_mask(keep: &[bool]) -> Self {
        let (kept, removed): (Vec<usize>, Vec<usize>) = (0..keep.len()).partition(|&i| keep[i]);
        Self {
            original_len: keep.len(),
            kept,
            removed,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.removed.is_empty()
    }

    /// Pads primal points with zeros at removed coordinates and records the
    /// removed indices. Dual certificates live in the item-free space and pass
    /// through unchanged.
    pub fn reembed(&self, mut outcome: SolveOutcome) -> SolveOutcome {
        if let Verdict::Primal(x) = &outcome.verdict {
            outcome.verdict = Verdict::Primal(x.reembed(self.original_len, &self.kept));
        }
        outcome.removed = self.removed.clone();
        outcome
    }
}
