use std::time::Instant;

use ndarray::Array2;

use crate::error::{invalid, Error, Result};
use crate::linalg::eigen::{symmetric_eigen, symmetric_eigen_warm};
use crate::linalg::schatten::{odd_order, schatten_norm_of_spectrum, vector_pnorm};
use crate::outcome::{IterationRecord, SolveOutcome, Verdict};
use crate::weights::WeightVector;

use super::instance::SdpPackingInstance;

/// Parameters of the box-constrained decision procedure at one target scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxedConfig {
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    pub eps: f64,
    pub p: u32,
    /// Order of the `l_p'` norm standing in for `l_inf` on the box term.
    pub p_prime: f64,
    /// Scale of the box operator `S = box_scale * I`, i.e. `n / (1 + alpha)`.
    pub box_scale: f64,
    /// Termination threshold `3 / eps` on all three norms.
    pub threshold: f64,
    pub eta: f64,
    pub iteration_cap: usize,
    /// Matrices enter as `A_i / target`.
    pub target: f64,
    /// Wall-clock limit; exceeding it aborts with [`Error::DeadlineExceeded`].
    pub deadline: Option<Instant>,
}

impl BoxedConfig {
    /// Builds the configuration, requiring `eps <= c_box * alpha`.
    ///
    /// The step is `1 / max(4 p', p' + 2K, p + 2K)`; for `n >= 8` and `p <= p'`
    /// this is `1 / (4 p')`.
    pub fn new(n: usize, d: usize, alpha: f64, eps: f64, p: f64, c_box: f64) -> Result<Self> {
        let p = odd_order(p)?;
        if n == 0 || d == 0 {
            return invalid("instance must be non-empty");
        }
        if !(eps > 0.0 && eps <= 0.5) {
            return invalid(format!("accuracy eps = {eps} must lie in (0, 1/2]"));
        }
        if !(alpha >= 0.0 && alpha <= (n - 1) as f64 + 1e-12) {
            return invalid(format!("box slack alpha = {alpha} must lie in [0, n - 1]"));
        }
        if eps > c_box * alpha {
            return invalid(format!("accuracy eps = {eps} exceeds c_box * alpha = {}", c_box * alpha));
        }
        let p_prime = ((n as f64).ln() / eps).max(1.0);
        let threshold = 3.0 / eps;
        let eta = 1.0 / (4.0 * p_prime).max(p_prime + 2.0 * threshold).max(p as f64 + 2.0 * threshold);
        let iteration_cap = (6.0 * ((n * d) as f64 / eps).ln() / (eta * eps)).ceil() as usize;
        Ok(Self {
            n,
            d,
            alpha,
            eps,
            p,
            p_prime,
            box_scale: n as f64 / (1.0 + alpha),
            threshold,
            eta,
            iteration_cap,
            target: 1.0,
            deadline: None,
        })
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target = target;
        self
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }
}

/// Everything the potential and its gradient need at one weight vector.
struct MixedState {
    matrix_norm: f64,
    box_norm: f64,
    weight_l1: f64,
    potential: f64,
    gradient: Option<Vec<f64>>,
    basis: Array2<f64>,
}

fn evaluate(inst: &SdpPackingInstance, w: &[f64], cfg: &BoxedConfig, basis: Option<&Array2<f64>>, want_gradient: bool) -> MixedState {
    let m = inst.combine(w);
    let eig = match basis {
        Some(b) => symmetric_eigen_warm(&m, b.view()),
        None => symmetric_eigen(&m),
    };
    let raw_norm = schatten_norm_of_spectrum(&eig.eigenvalues, cfg.p as f64);
    let matrix_norm = raw_norm / cfg.target;
    let wp = vector_pnorm(w, cfg.p_prime);
    let box_norm = cfg.box_scale * wp;
    let weight_l1: f64 = w.iter().sum();
    let hi = matrix_norm.max(box_norm);
    let gap = (matrix_norm - box_norm).abs();
    let potential = hi + (-gap).exp().ln_1p() - weight_l1;

    let gradient = want_gradient.then(|| {
        // softmax weights of the two norms
        let e = (-gap).exp();
        let (wa, wb) = if matrix_norm >= box_norm {
            (1.0 / (1.0 + e), e / (1.0 + e))
        } else {
            (e / (1.0 + e), 1.0 / (1.0 + e))
        };
        let matrix_scores = if raw_norm == 0.0 {
            vec![0.0; w.len()]
        } else {
            let y = eig.map_spectrum(|l| (l.abs() / raw_norm).powi(cfg.p as i32 - 1));
            inst.family().inner_all(&y).into_iter().map(|s| s / cfg.target).collect()
        };
        w.iter()
            .zip(matrix_scores)
            .map(|(&wi, s)| {
                let zi = if wp == 0.0 { 0.0 } else { (wi / wp).powf(cfg.p_prime - 1.0) };
                1.0 - (wa * s + wb * cfg.box_scale * zi)
            })
            .collect()
    });
    MixedState {
        matrix_norm,
        box_norm,
        weight_l1,
        potential,
        gradient,
        basis: eig.eigenvectors,
    }
}

fn check_weights(inst: &SdpPackingInstance, w: &[f64], cfg: &BoxedConfig) -> Result<()> {
    if w.len() != inst.n() {
        return Err(Error::DimensionMismatch {
            expected: inst.n(),
            got: w.len(),
        });
    }
    if inst.n() != cfg.n || inst.d() != cfg.d {
        return invalid("config was built for a different instance size");
    }
    if w.iter().any(|x| !(*x >= 0.0)) {
        return invalid("weights must be nonnegative");
    }
    Ok(())
}

/// `ln(exp(||A(w)||_p) + exp(||S w||_p')) - ||w||_1`, evaluated stably.
pub fn mixed_potential(inst: &SdpPackingInstance, w: &[f64], cfg: &BoxedConfig) -> Result<f64> {
    check_weights(inst, w, cfg)?;
    Ok(evaluate(inst, w, cfg, None, false).potential)
}

/// The paper's gradient form `1 - (softmax-mixed norm derivatives)`, which is
/// the negated derivative of [`mixed_potential`].
pub fn mixed_gradient(inst: &SdpPackingInstance, w: &[f64], cfg: &BoxedConfig) -> Result<Vec<f64>> {
    check_weights(inst, w, cfg)?;
    if w.iter().all(|&x| x == 0.0) {
        return Err(Error::DegenerateInput("gradient is undefined at w = 0".into()));
    }
    let st = evaluate(inst, w, cfg, None, true);
    if st.matrix_norm == 0.0 {
        return Err(Error::DegenerateInput("sum_i w_i A_i vanishes".into()));
    }
    Ok(st.gradient.expect("requested"))
}

/// Decides at scale `cfg.target`: returns `Primal(x)` with
/// `||A(x)||_p <= (1 + eps) target` and `||x||_inf <= (1 + eps)(1 + alpha)/n`,
/// or `Infeasible` once the iteration cap is reached, certifying that no
/// simplex point has `||A(x)||_p <= (1 - eps) target` with
/// `||S x||_p' <= 1 - eps`.
pub fn boxed_schatten_decide(inst: &SdpPackingInstance, cfg: &BoxedConfig, record_trace: bool) -> Result<SolveOutcome> {
    if inst.n() != cfg.n || inst.d() != cfg.d {
        return invalid("config was built for a different instance size");
    }
    if !(cfg.target > 0.0 && cfg.target.is_finite()) {
        return invalid(format!("target scale {} must be positive", cfg.target));
    }
    let (n, d) = (cfg.n, cfg.d);
    let mut w = vec![cfg.eps / ((n * n * d) as f64); n];
    let mut trace = Vec::new();
    let mut basis: Option<Array2<f64>> = None;
    let mut t = 0;
    loop {
        let st = evaluate(inst, &w, cfg, basis.as_ref(), true);
        let running =
            st.matrix_norm <= cfg.threshold && st.box_norm <= cfg.threshold && st.weight_l1 <= cfg.threshold;
        let g: Vec<f64> = st
            .gradient
            .as_ref()
            .expect("requested")
            .iter()
            .map(|x| x.clamp(0.0, 1.0))
            .collect();
        if record_trace {
            trace.push(IterationRecord {
                potential: st.potential,
                weight_l1: st.weight_l1,
                gradient_norm: if running { g.iter().fold(0.0_f64, |m, v| m.max(*v)) } else { 0.0 },
            });
        }
        if !running {
            break;
        }
        basis = Some(st.basis);
        for (wi, gi) in w.iter_mut().zip(&g) {
            *wi *= 1.0 + cfg.eta * gi;
        }
        t += 1;
        if t % 10_000 == 0 {
            log::trace!("boxed decide: iteration {t} of {}, |w|_1 = {:.4e}", cfg.iteration_cap, st.weight_l1);
        }
        if t % 256 == 0 && cfg.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Error::DeadlineExceeded { iterations: t });
        }
        if t >= cfg.iteration_cap {
            return Ok(SolveOutcome {
                verdict: Verdict::Infeasible,
                iterations: t,
                iteration_cap: cfg.iteration_cap,
                trace,
                removed: Vec::new(),
            });
        }
    }
    let s: f64 = w.iter().sum();
    Ok(SolveOutcome {
        verdict: Verdict::Primal(WeightVector::new(w.into_iter().map(|x| x / s).collect())?),
        iterations: t,
        iteration_cap: cfg.iteration_cap,
        trace,
        removed: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    /// Require `eps <= c_box * alpha`.
    pub c_box: f64,
    pub record_trace: bool,
    pub deadline: Option<Instant>,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            c_box: 1.0,
            record_trace: false,
            deadline: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoxedOptimum {
    pub x: WeightVector,
    /// Exact `||A(x)||_p` of the returned point.
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Lower bound on the constrained optimum implied by the bracket and the
    /// infeasible decisions, so that `value <= (1 + eps) certified_lower`.
    pub certified_lower: f64,
    pub decide_calls: usize,
    pub total_iterations: usize,
    /// Decide traces, in call order, when requested.
    pub traces: Vec<Vec<IterationRecord>>,
}

/// Minimum of `sum_i x_i t_i` over simplex points with `x_i <= cap`, filling
/// the smallest `t_i` first.
fn water_filled_trace(traces: &[f64], cap: f64) -> f64 {
    let mut sorted = traces.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut mass = 1.0;
    let mut total = 0.0;
    for t in sorted {
        if mass <= 0.0 {
            break;
        }
        let m = cap.min(mass);
        total += m * t;
        mass -= m;
    }
    total
}

/// Approximately solves `min ||sum_i x_i A_i||_p` over simplex points with
/// `||x||_inf <= (1 + alpha)/n`, by binary search over a geometric grid of
/// target scales.
///
/// Returns `x` with `||x||_inf <= (1 + alpha)(1 + eps)/n` and value at most
/// `(1 + eps)` times the constrained optimum. Internally each decision runs
/// at accuracy `eps/4` on the widened box `alpha'` with
/// `1 + alpha' = (1 + alpha) e^{eps/4} / (1 - eps/4)`, so that every point of
/// the original box passes the softened box test of the decision procedure.
pub fn boxed_schatten_optimize(inst: &SdpPackingInstance, alpha: f64, eps: f64, p: f64, opts: &OptimizeOptions) -> Result<BoxedOptimum> {
    odd_order(p)?;
    let (n, d) = (inst.n(), inst.d());
    if !(eps > 0.0 && eps <= 0.5) {
        return invalid(format!("accuracy eps = {eps} must lie in (0, 1/2]"));
    }
    let uniform = WeightVector::uniform(n);
    let upper = schatten_norm_of_spectrum(&symmetric_eigen(&inst.combine(uniform.as_slice())).eigenvalues, p);
    if alpha == 0.0 || n == 1 || upper == 0.0 {
        return Ok(BoxedOptimum {
            x: uniform,
            value: upper,
            lower: upper,
            upper,
            certified_lower: upper,
            decide_calls: 0,
            total_iterations: 0,
            traces: Vec::new(),
        });
    }
    if !(alpha > 0.0 && alpha <= (n - 1) as f64) {
        return invalid(format!("box slack alpha = {alpha} must lie in [0, n - 1]"));
    }
    if eps > opts.c_box * alpha {
        return invalid(format!("accuracy eps = {eps} exceeds c_box * alpha = {}", opts.c_box * alpha));
    }

    let cap = (1.0 + alpha) / n as f64;
    let traces: Vec<f64> = (0..n).map(|i| inst.family().trace(i)).collect();
    let lower = water_filled_trace(&traces, cap) / (d as f64).powf(1.0 - 1.0 / p);
    if lower > upper * (1.0 + 1e-12) {
        return invalid(format!("bracket inverted: lower {lower} > upper {upper}"));
    }

    let e = eps / 4.0;
    let alpha_wide = ((1.0 + alpha) * e.exp() / (1.0 - e) - 1.0).min((n - 1) as f64);
    let base = BoxedConfig::new(n, d, alpha_wide, e, p, f64::INFINITY)?.with_deadline(opts.deadline);
    let ratio = 1.0 + e;

    let mut best_x = uniform;
    let mut best_value = upper;
    let mut calls = 0;
    let mut total_iterations = 0;
    let mut decide_traces = Vec::new();

    if lower <= 0.0 {
        // Zero-trace matrices can absorb all the mass; the water-filled point is optimal.
        let mut sorted: Vec<usize> = (0..n).collect();
        sorted.sort_by(|&a, &b| traces[a].total_cmp(&traces[b]));
        let mut x = vec![0.0; n];
        let mut mass = 1.0;
        for i in sorted {
            let m = cap.min(mass);
            x[i] = m;
            mass -= m;
        }
        let x = WeightVector::new(x)?.normalized();
        let value = schatten_norm_of_spectrum(&symmetric_eigen(&inst.combine(x.as_slice())).eigenvalues, p);
        return Ok(BoxedOptimum {
            x,
            value,
            lower: 0.0,
            upper,
            certified_lower: value,
            decide_calls: 0,
            total_iterations: 0,
            traces: Vec::new(),
        });
    }

    let steps = ((upper / lower).ln() / ratio.ln()).ceil().max(0.0) as i64;
    // grid point k is lower * ratio^k; `hi` always has a primal point in hand
    let (mut lo, mut hi) = (-1_i64, steps);
    let mut certified = lower;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let target = lower * ratio.powi(mid as i32);
        let cfg = base.with_target(target);
        let out = boxed_schatten_decide(inst, &cfg, opts.record_trace)?;
        calls += 1;
        total_iterations += out.iterations;
        log::debug!(
            "boxed decide at scale {target:.6e}: {} after {} iterations",
            out.verdict.label(),
            out.iterations
        );
        if opts.record_trace {
            decide_traces.push(out.trace);
        }
        match out.verdict {
            Verdict::Primal(x) => {
                let value = schatten_norm_of_spectrum(&symmetric_eigen(&inst.combine(x.as_slice())).eigenvalues, p);
                if value < best_value {
                    best_value = value;
                    best_x = x;
                }
                hi = mid;
            }
            Verdict::Infeasible => {
                certified = certified.max((1.0 - e) * target);
                lo = mid;
            }
            _ => return Err(Error::InvariantViolation("boxed decide returned a dual verdict".into())),
        }
    }
    Ok(BoxedOptimum {
        x: best_x,
        value: best_value,
        lower,
        upper,
        certified_lower: certified,
        decide_calls: calls,
        total_iterations,
        traces: decide_traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use ndarray::Array2;

    fn diagonal(n: usize) -> SdpPackingInstance {
        SdpPackingInstance::from_samples(Array2::eye(n)).unwrap()
    }

    #[test]
    fn potential_at_zero_is_ln2() {
        let inst = diagonal(3);
        let cfg = BoxedConfig::new(3, 3, 0.5, 0.1, 3.0, 1.0).unwrap();
        let v = mixed_potential(&inst, &[0.0; 3], &cfg).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn potential_single_coordinate() {
        let (n, alpha) = (4, 0.5);
        let inst = diagonal(n);
        let cfg = BoxedConfig::new(n, n, alpha, 0.1, 3.0, 1.0).unwrap();
        let c = (1.0 + alpha) / n as f64;
        let v = mixed_potential(&inst, &[c, 0.0, 0.0, 0.0], &cfg).unwrap();
        let expect = (c.exp() + 1f64.exp()).ln() - c;
        assert!((v - expect).abs() < 1e-12);
    }

    #[test]
    fn gradient_symmetric_on_uniform() {
        let inst = diagonal(4);
        let cfg = BoxedConfig::new(4, 4, 0.5, 0.1, 3.0, 1.0).unwrap();
        let g = mixed_gradient(&inst, &[0.3; 4], &cfg).unwrap();
        for x in &g {
            assert!((x - g[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_limit_when_matrix_term_dominates() {
        let inst = SdpPackingInstance::new(vec![SymMatrix::identity(2).scaled(500.0), SymMatrix::from_diag(&[300.0, 0.0])]).unwrap();
        let cfg = BoxedConfig::new(2, 2, 1.0, 0.1, 3.0, 1.0).unwrap();
        let w = [0.05, 0.05];
        let g = mixed_gradient(&inst, &w, &cfg).unwrap();
        let m = inst.combine(&w);
        let eig = symmetric_eigen(&m);
        let norm = schatten_norm_of_spectrum(&eig.eigenvalues, 3.0);
        let y = eig.map_spectrum(|l| (l / norm).powi(2));
        for (gi, s) in g.iter().zip(inst.family().inner_all(&y)) {
            assert!((gi - (1.0 - s)).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_weights_are_degenerate() {
        let inst = diagonal(2);
        let cfg = BoxedConfig::new(2, 2, 0.5, 0.1, 3.0, 1.0).unwrap();
        assert!(matches!(mixed_gradient(&inst, &[0.0, 0.0], &cfg), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn config_requires_eps_below_alpha() {
        assert!(BoxedConfig::new(4, 4, 0.05, 0.1, 3.0, 1.0).is_err());
        assert!(BoxedConfig::new(4, 4, 0.5, 0.1, 4.0, 1.0).is_err());
    }

    #[test]
    fn water_filling() {
        assert!((water_filled_trace(&[3.0, 1.0, 2.0], 0.5) - 1.5).abs() < 1e-15);
        assert!((water_filled_trace(&[3.0, 1.0, 2.0], 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_strictly_feasible_is_primal() {
        let (n, eps) = (4, 0.1);
        let inst = diagonal(n);
        let uniform_value = (n as f64).powf(1.0 / 3.0 - 1.0);
        let target = uniform_value / (1.0 - 2.0 * eps);
        let cfg = BoxedConfig::new(n, n, 0.5, eps, 3.0, 1.0).unwrap().with_target(target);
        let out = boxed_schatten_decide(&inst, &cfg, true).unwrap();
        assert!(out.verdict.is_primal());
        for w in out.trace.windows(2) {
            assert!(w[1].potential <= w[0].potential + 1e-9 * w[0].potential.abs().max(1.0));
        }
    }

    #[test]
    fn alpha_zero_returns_uniform() {
        let inst = SdpPackingInstance::new(vec![SymMatrix::from_diag(&[1.0, 0.0]), SymMatrix::from_diag(&[0.0, 3.0])]).unwrap();
        let out = boxed_schatten_optimize(&inst, 0.0, 0.1, 3.0, &OptimizeOptions::default()).unwrap();
        assert_eq!(out.x, WeightVector::uniform(2));
        let expect = (0.5f64.powi(3) + 1.5f64.powi(3)).powf(1.0 / 3.0);
        assert!((out.value - expect).abs() < 1e-12);
    }
}
