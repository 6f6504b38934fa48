use std::time::Instant;

use ndarray::{Array2, ArrayView2};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::linalg::schatten::{odd_order, schatten_norm_of_spectrum};
use crate::linalg::{symmetric_eigen, simultaneous_power_iteration, PowerConfig, SymOperator, WeightedGram};
use crate::sdp::{boxed_schatten_optimize, OptimizeOptions, SdpPackingInstance};
use crate::weights::WeightVector;

use super::univariate::one_d_robust_variance;

/// Parameters of the nearly-linear robust PCA pipeline. The Schatten order
/// and target slack are derived from `eps` and the dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobustPcaConfig {
    pub eps: f64,
    pub delta: f64,
    /// Number of candidate directions.
    pub t: usize,
    /// `eps_tilde = c_prime eps ln(1/eps)`.
    pub c_prime: f64,
    /// Multiplier on the sub-Gaussian proxy scale in the recovery guarantee.
    pub c_star: f64,
    #[serde(skip)]
    pub power: PowerConfig,
    pub seed: u64,
    pub record_trace: bool,
    #[serde(skip)]
    pub deadline: Option<Instant>,
}

impl RobustPcaConfig {
    pub fn new(eps: f64, delta: f64, t: usize) -> Self {
        Self {
            eps,
            delta,
            t,
            c_prime: 1.0,
            c_star: 1.0,
            power: PowerConfig::default(),
            seed: 0,
            record_trace: false,
            deadline: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn eps_tilde(&self) -> f64 {
        self.c_prime * self.eps * (1.0 / self.eps).ln()
    }

    /// Smallest odd integer `>= max(3, (2/7) sqrt(ln(3d) / eps_tilde))`.
    pub fn order(&self, d: usize) -> u32 {
        let raw = (2.0 / 7.0) * ((3.0 * d as f64).ln() / self.eps_tilde()).sqrt();
        let mut p = raw.ceil().max(3.0) as u32;
        if p % 2 == 0 {
            p += 1;
        }
        p
    }

    /// `14 sqrt(eps_tilde ln(3d))`.
    pub fn gamma(&self, d: usize) -> f64 {
        14.0 * (self.eps_tilde() * (3.0 * d as f64).ln()).sqrt()
    }
}

/// Candidate directions scored by robust variance.
#[derive(Debug, Clone, Serialize)]
pub struct CandidateSet {
    /// `d x t`, orthonormal power-iteration outputs.
    pub z: Array2<f64>,
    /// `d x t`, unit columns `M^{(p-1)/2} z_j / |M^{(p-1)/2} z_j|`.
    pub y: Array2<f64>,
    pub scores: Vec<f64>,
    pub best: usize,
}

impl CandidateSet {
    pub fn best_direction(&self) -> Vec<f64> {
        self.y.column(self.best).to_vec()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FastDiagnostics {
    pub order: u32,
    pub eps_tilde: f64,
    pub gamma: f64,
    /// `gamma >= 1`, so the recovery bound says nothing at this scale.
    pub guarantee_vacuous: bool,
    pub weights: WeightVector,
    /// `|sum_i w_i X_i X_i^T|_p` at the returned weights.
    pub schatten_value: f64,
    pub bracket: (f64, f64),
    pub decide_calls: usize,
    pub solver_iterations: usize,
    pub power_applications: usize,
    pub candidates: CandidateSet,
}

/// Nearly-linear robust PCA: reweights the samples by approximately
/// minimizing the Schatten-`p` norm of their weighted covariance over the
/// box `w_i <= (1 + eps)/n`, extracts `t` candidate directions by power
/// iteration on the reweighted covariance, and returns the candidate with the
/// largest robust variance.
pub fn robust_pca_fast(samples: ArrayView2<'_, f64>, cfg: &RobustPcaConfig) -> Result<(Vec<f64>, FastDiagnostics)> {
    let (n, d) = samples.dim();
    if n < 2 || d == 0 {
        return invalid("need at least two samples of positive dimension");
    }
    let eps = cfg.eps;
    if !(eps > 0.0 && eps < 0.5) {
        return invalid(format!("corruption level eps = {eps} must lie in (0, 1/2)"));
    }
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return invalid(format!("failure probability delta = {} must lie in (0, 1)", cfg.delta));
    }
    if cfg.t == 0 || cfg.t > d {
        return invalid(format!("rank bound t = {} must lie in [1, {d}]", cfg.t));
    }
    let p = cfg.order(d);
    let gamma = cfg.gamma(d);
    if gamma >= 1.0 {
        log::warn!("target slack gamma = {gamma:.3} is at least 1; the recovery bound is vacuous");
    }

    let inst = SdpPackingInstance::from_samples(samples.to_owned())?;
    let opts = OptimizeOptions {
        c_box: 1.0,
        record_trace: cfg.record_trace,
        deadline: cfg.deadline,
    };
    let opt = boxed_schatten_optimize(&inst, eps, eps, p as f64, &opts)?;
    let w = opt.x.as_slice();

    let op = WeightedGram::new(samples.view(), w)?;
    let power = simultaneous_power_iteration(&op, cfg.t, p, eps.min(0.5), cfg.seed, &cfg.power)?;
    let candidates = score_candidates(samples, &op, power.vectors, p, eps)?;
    let u = candidates.best_direction();

    let value = schatten_norm_of_spectrum(&symmetric_eigen(&inst.combine(w)).eigenvalues, p as f64);
    let diagnostics = FastDiagnostics {
        order: p,
        eps_tilde: cfg.eps_tilde(),
        gamma,
        guarantee_vacuous: gamma >= 1.0,
        weights: opt.x.clone(),
        schatten_value: value,
        bracket: (opt.lower, opt.upper),
        decide_calls: opt.decide_calls,
        solver_iterations: opt.total_iterations,
        power_applications: power.applications,
        candidates,
    };
    Ok((u, diagnostics))
}

/// Maps each column of `z` through `M^{(p-1)/2}`, normalizes, and scores it by
/// robust variance. Columns mapped to zero keep their original direction.
pub fn score_candidates(
    samples: ArrayView2<'_, f64>,
    op: &dyn SymOperator,
    z: Array2<f64>,
    p: u32,
    eps: f64,
) -> Result<CandidateSet> {
    let p = odd_order(p as f64)?;
    let mut y = z.clone();
    for _ in 0..(p - 1) / 2 {
        y = op.apply_block(y.view());
    }
    for (j, mut col) in y.columns_mut().into_iter().enumerate() {
        let norm = col.dot(&col).sqrt();
        if norm > 0.0 {
            col /= norm;
        } else {
            col.assign(&z.column(j));
        }
    }
    let scores = y
        .columns()
        .into_iter()
        .map(|col| one_d_robust_variance(samples, &col.to_vec(), eps))
        .collect::<Result<Vec<f64>>>()?;
    let best = (0..scores.len())
        .max_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(b.cmp(&a)))
        .expect("at least one candidate");
    Ok(CandidateSet { z, y, scores, best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;

    #[test]
    fn derived_parameters() {
        let cfg = RobustPcaConfig::new(0.05, 0.1, 1);
        let et = 0.05 * 20f64.ln();
        assert!((cfg.eps_tilde() - et).abs() < 1e-15);
        assert_eq!(cfg.order(20), 3);
        assert!(cfg.gamma(20) > 1.0);
        let tiny = RobustPcaConfig::new(1e-6, 0.1, 1);
        let p = tiny.order(20);
        assert!(p % 2 == 1 && p >= 3);
        let raw = (2.0 / 7.0) * (60f64.ln() / tiny.eps_tilde()).sqrt();
        assert!(p as f64 >= raw && (p as f64) < raw + 2.0);
    }

    #[test]
    fn candidate_scores_pick_the_spike() {
        let x = ndarray::array![[3.0, 0.0], [-3.0, 0.0], [0.0, 1.0], [0.0, -1.0]];
        let m = SymMatrix::from_diag(&[4.5, 0.5]);
        let z = Array2::eye(2);
        let c = score_candidates(x.view(), &m, z, 3, 0.0).unwrap();
        assert_eq!(c.best, 0);
        assert!((c.scores[0] - 4.5).abs() < 1e-12);
    }

    #[test]
    fn rank_bound_checked() {
        let x = Array2::<f64>::eye(3);
        assert!(robust_pca_fast(x.view(), &RobustPcaConfig::new(0.1, 0.1, 4)).is_err());
    }
}
