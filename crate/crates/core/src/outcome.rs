use serde::{Deserialize, Serialize};

use crate::linalg::SymMatrix;
use crate::weights::WeightVector;

/// Result of a packing decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    /// A simplex point meeting the target.
    Primal(WeightVector),
    /// A dual vector certifying the LP target is out of reach.
    DualVector(Vec<f64>),
    /// A PSD dual matrix certifying the SDP target is out of reach.
    DualMatrix(SymMatrix),
    /// The iteration cap was reached without a primal point (boxed solver).
    Infeasible,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Primal(_) => "primal",
            Verdict::DualVector(_) | Verdict::DualMatrix(_) => "dual",
            Verdict::Infeasible => "infeasible",
        }
    }

    pub fn primal(&self) -> Option<&WeightVector> {
        match self {
            Verdict::Primal(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_primal(&self) -> bool {
        matches!(self, Verdict::Primal(_))
    }
}

/// Solver state at the start of one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub potential: f64,
    pub weight_l1: f64,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub verdict: Verdict,
    pub iterations: usize,
    pub iteration_cap: usize,
    /// One record per iteration plus the final state; empty unless requested.
    pub trace: Vec<IterationRecord>,
    /// Items dropped by preprocessing, as indices into the original instance.
    pub removed: Vec<usize>,
}

/// Number of steps where the potential rose by more than
/// `rel_tol * max(|previous|, 1)`.
pub fn potential_increases(trace: &[IterationRecord], rel_tol: f64) -> usize {
    trace
        .windows(2)
        .filter(|w| w[1].potential > w[0].potential + rel_tol * w[0].potential.abs().max(1.0))
        .count()
}
