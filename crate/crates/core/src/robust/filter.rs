use ndarray::{ArrayView2, Axis};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{simultaneous_power_iteration, PowerConfig};
use crate::weights::WeightVector;

use super::covariance::weighted_covariance;
use super::downweight::downweight;
use super::univariate::{one_d_robust_variance, robust_trace_estimate, squared_projections};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    /// Termination when `u^T M u <= (1 + c_filter eps ln(1/eps)) sigma^2`.
    pub c_filter: f64,
    /// Samples with `|X_i|^2 > c_tail ln(n/delta) Tr` are dropped up front.
    pub c_tail: f64,
    /// Iteration cap `ceil(c_iter d ln(n/delta))`.
    pub c_iter: f64,
    pub power: PowerConfig,
    pub seed: u64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            c_filter: 5.0,
            c_tail: 20.0,
            c_iter: 10.0,
            power: PowerConfig::default(),
            seed: 0,
        }
    }
}

impl FilterConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Heuristic sample floor `10 (d + ln(1/delta)) / (eps ln(1/eps))^2`.
    pub fn n_min(d: usize, eps: f64, delta: f64) -> f64 {
        let s = eps * (1.0 / eps).ln();
        10.0 * (d as f64 + (1.0 / delta).ln()) / (s * s)
    }

    pub fn iteration_cap(&self, n: usize, d: usize, delta: f64) -> usize {
        (self.c_iter * d as f64 * (n as f64 / delta).ln()).ceil().max(1.0) as usize
    }
}

/// One pass of the filter loop. Index-valued fields and weight snapshots
/// refer to the original sample indices.
#[derive(Debug, Clone, Serialize)]
pub struct FilterState {
    pub iteration: usize,
    /// Weights entering this iteration.
    pub weights: WeightVector,
    pub direction: Vec<f64>,
    /// Robust variance along `direction`.
    pub robust_variance: f64,
    /// `u^T M(w) u` for the entering weights.
    pub weighted_variance: f64,
    /// `<u, X_i>^2`; zero for samples dropped by tail removal.
    pub projections: Vec<f64>,
    /// Indices downweighted this iteration; empty on the terminating pass.
    pub suffix: Vec<usize>,
    pub suffix_mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FilterOutcome {
    pub direction: Vec<f64>,
    /// Final weights over the original samples.
    pub weights: WeightVector,
    pub trace: Vec<FilterState>,
    pub iterations: usize,
    /// The iteration cap was reached before the termination test passed.
    pub truncated: bool,
    pub tail_removed: Vec<usize>,
    pub trace_estimate: f64,
    /// Iterations whose downweighted suffix carried more than `3 eps` mass.
    pub suffix_overshoots: usize,
}

impl FilterOutcome {
    /// `1 - sum_i w_i`, the mass removed by downweighting.
    pub fn removed_mass(&self) -> f64 {
        1.0 - self.weights.l1()
    }

    /// Weight snapshots, followed by the final weights, never increase.
    pub fn is_weight_monotone(&self) -> bool {
        let mut snaps: Vec<&[f64]> = self.trace.iter().map(|s| s.weights.as_slice()).collect();
        snaps.push(self.weights.as_slice());
        snaps
            .windows(2)
            .all(|w| w[1].iter().zip(w[0]).all(|(a, b)| a <= b))
    }

    /// `(bad, good)` weight removed by each downweighting iteration, given
    /// which samples are truly corrupted.
    pub fn removal_split(&self, is_bad: &[bool]) -> Vec<(f64, f64)> {
        let mut snaps: Vec<&[f64]> = self.trace.iter().map(|s| s.weights.as_slice()).collect();
        snaps.push(self.weights.as_slice());
        self.trace
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.suffix.is_empty())
            .map(|(k, _)| {
                let (before, after) = (snaps[k], snaps[k + 1]);
                let mut split = (0.0, 0.0);
                for (i, (b, a)) in before.iter().zip(after).enumerate() {
                    if is_bad[i] {
                        split.0 += b - a;
                    } else {
                        split.1 += b - a;
                    }
                }
                split
            })
            .collect()
    }
}

/// Filtering robust PCA: repeatedly finds the top eigenvector `u` of the
/// weighted empirical covariance and stops once its weighted variance is
/// explained by the robust variance along `u`; otherwise softly downweights
/// the samples with the largest projections onto `u`.
pub fn pca_filter(samples: ArrayView2<'_, f64>, eps: f64, delta: f64, cfg: &FilterConfig) -> Result<FilterOutcome> {
    let (n, d) = samples.dim();
    if n == 0 || d == 0 {
        return invalid("dataset is empty");
    }
    if !(eps > 0.0 && eps < 0.5) {
        return invalid(format!("corruption level eps = {eps} must lie in (0, 1/2)"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return invalid(format!("failure probability delta = {delta} must lie in (0, 1)"));
    }
    let n_min = FilterConfig::n_min(d, eps, delta);
    if (n as f64) < n_min {
        log::warn!("n = {n} is below the heuristic sample floor {n_min:.0}");
    }

    let trace_estimate = robust_trace_estimate(samples, eps)?;
    let cutoff = cfg.c_tail * (n as f64 / delta).ln() * trace_estimate;
    let (kept, tail_removed): (Vec<usize>, Vec<usize>) =
        (0..n).partition(|&i| samples.row(i).dot(&samples.row(i)) <= cutoff);
    if kept.len() < 2 {
        return invalid(format!("only {} sample(s) survive tail removal", kept.len()));
    }
    let x = samples.select(Axis(0), &kept);
    let m = kept.len();

    let log_inv = (1.0 / eps).ln();
    let stop_factor = 1.0 + cfg.c_filter * eps * log_inv;
    let eps_tilde = (eps * log_inv / 10.0).min(0.5);
    let cap = cfg.iteration_cap(n, d, delta);

    let mut w = WeightVector::uniform(m);
    let mut trace = Vec::new();
    let mut overshoots = 0;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for t in 1..=cap {
        let cov = weighted_covariance(x.view(), w.as_slice())?;
        let u = match simultaneous_power_iteration(&cov, 1, 1, eps_tilde, cfg.seed.wrapping_add(t as u64), &cfg.power) {
            Ok(r) => r.vector(0),
            Err(Error::ConvergenceFailure { mut partial, .. }) => partial.swap_remove(0),
            Err(e) => return Err(e),
        };
        let weighted_variance = cov.quad_form(&u);
        let sigma2 = one_d_robust_variance(x.view(), &u, eps)?;
        let scores = squared_projections(x.view(), &u)?;
        if best.as_ref().is_none_or(|(s, _)| sigma2 > *s) {
            best = Some((sigma2, u.clone()));
        }

        let mut state = FilterState {
            iteration: t,
            weights: w.reembed(n, &kept),
            direction: u.clone(),
            robust_variance: sigma2,
            weighted_variance,
            projections: scatter(n, &kept, &scores),
            suffix: Vec::new(),
            suffix_mass: 0.0,
        };
        if weighted_variance <= stop_factor * sigma2 {
            trace.push(state);
            return Ok(FilterOutcome {
                direction: u,
                weights: w.reembed(n, &kept),
                trace,
                iterations: t,
                truncated: false,
                tail_removed,
                trace_estimate,
                suffix_overshoots: overshoots,
            });
        }

        let (suffix, mass) = heavy_suffix(w.as_slice(), &scores, 2.0 * eps);
        if mass > 3.0 * eps {
            overshoots += 1;
            log::warn!("filter iteration {t}: suffix mass {mass:.4} exceeds 3 eps");
        }
        let next = downweight(&w, &scores, &suffix)?;
        if next.as_slice().iter().zip(w.as_slice()).any(|(a, b)| a > b) {
            return Err(Error::InvariantViolation("filter weights increased".into()));
        }
        state.suffix = suffix.iter().map(|&i| kept[i]).collect();
        state.suffix_mass = mass;
        trace.push(state);
        w = next;
    }
    log::warn!("filter hit its iteration cap of {cap}");
    let (_, direction) = best.expect("at least one iteration ran");
    Ok(FilterOutcome {
        direction,
        weights: w.reembed(n, &kept),
        trace,
        iterations: cap,
        truncated: true,
        tail_removed,
        trace_estimate,
        suffix_overshoots: overshoots,
    })
}

fn scatter(n: usize, kept: &[usize], values: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (&i, &v) in kept.iter().zip(values) {
        out[i] = v;
    }
    out
}

/// Positive-weight indices with the largest scores, taken from the top until
/// their weight reaches `mass`. Ties are broken by index.
fn heavy_suffix(w: &[f64], scores: &[f64], mass: f64) -> (Vec<usize>, f64) {
    let mut order: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0.0).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut taken = Vec::new();
    let mut total = 0.0;
    for i in order {
        if total >= mass {
            break;
        }
        total += w[i];
        taken.push(i);
    }
    (taken, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn suffix_is_minimal() {
        let w = [0.25, 0.25, 0.25, 0.25];
        let a = [4.0, 1.0, 3.0, 2.0];
        let (s, m) = heavy_suffix(&w, &a, 0.3);
        assert_eq!(s, vec![0, 2]);
        assert_eq!(m, 0.5);
        let (s, _) = heavy_suffix(&[0.0, 0.5, 0.5], &[9.0, 1.0, 2.0], 0.1);
        assert_eq!(s, vec![2]);
    }

    #[test]
    fn degenerate_after_tail_removal() {
        let x = array![[0.0, 0.0], [1.0, 1.0]];
        assert!(matches!(
            pca_filter(x.view(), 0.25, 0.1, &FilterConfig::default()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn isotropic_data_terminates() {
        let x = Array2::from_shape_fn((40, 2), |(i, j)| if (i + j) % 2 == 0 { 1.0 } else { -1.0 });
        let out = pca_filter(x.view(), 0.05, 0.1, &FilterConfig::default()).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(!out.truncated);
        assert!(out.removed_mass().abs() < 1e-12);
    }
}
