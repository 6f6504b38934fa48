use crate::certificate::CertificateReport;
use crate::error::{invalid, Error, Result};
use crate::linalg::schatten::{dual_exponent, vector_pnorm};
use crate::outcome::Verdict;

use super::instance::LpPackingInstance;

/// Tolerance on the unit dual norm of a dual certificate.
pub const DUAL_NORM_TOLERANCE: f64 = 1e-6;
const SLACK: f64 = 1e-12;

/// Re-validates a primal point (`||Ax||_p <= 1 + eps`, `x` in the simplex) or a
/// dual vector (`y >= 0`, `||y||_q = 1`, `A^T y >= 1 - eps`).
pub fn check_lp_certificate(inst: &LpPackingInstance, verdict: &Verdict, eps: f64, p: f64) -> Result<CertificateReport> {
    match verdict {
        Verdict::Primal(x) => {
            if x.len() != inst.n() {
                return Err(Error::DimensionMismatch {
                    expected: inst.n(),
                    got: x.len(),
                });
            }
            let mut report = CertificateReport::new("primal");
            report.check_simplex(x.as_slice());
            let ax = inst.apply(x.as_slice());
            let norm = vector_pnorm(&ax, p);
            let bound = 1.0 + eps;
            if p.is_infinite() {
                for (j, v) in ax.iter().enumerate() {
                    report.margin(j, bound - v, || format!("row {j} has (Ax)_j = {v} > {bound}"));
                }
            } else {
                report.margin(0, bound - norm, || format!("||Ax||_p = {norm} > {bound}"));
                report.worst_index = ax
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(j, _)| j);
            }
            if norm > bound * (1.0 + SLACK) && report.passed {
                report.fail(format!("||Ax||_p = {norm} > {bound}"));
            }
            Ok(report)
        }
        Verdict::DualVector(y) => {
            if y.len() != inst.d() {
                return Err(Error::DimensionMismatch {
                    expected: inst.d(),
                    got: y.len(),
                });
            }
            let mut report = CertificateReport::new("dual");
            if let Some(j) = y.iter().position(|&v| v < 0.0) {
                report.fail(format!("dual coordinate {j} is negative"));
            }
            let q = dual_exponent(p);
            let yn = vector_pnorm(y, q);
            if (yn - 1.0).abs() > DUAL_NORM_TOLERANCE {
                report.fail(format!("||y||_q = {yn}, expected 1"));
            }
            let floor = 1.0 - eps;
            for (i, v) in inst.apply_transpose(y).iter().enumerate() {
                report.margin(i, v - floor, || format!("column {i} has (A^T y)_i = {v} < {floor}"));
            }
            Ok(report)
        }
        _ => invalid(format!("no LP certificate to check for a {} verdict", verdict.label())),
    }
}
