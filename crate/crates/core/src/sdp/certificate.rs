use crate::certificate::CertificateReport;
use crate::error::{invalid, Error, Result};
use crate::linalg::eigen::symmetric_eigen;
use crate::linalg::schatten::{dual_exponent, schatten_norm_of_spectrum};
use crate::outcome::Verdict;

use super::instance::SdpPackingInstance;

/// Smallest eigenvalue accepted for a PSD dual certificate.
pub const DUAL_PSD_FLOOR: f64 = -1e-8;
/// Tolerance on the unit dual norm of a dual certificate.
pub const DUAL_NORM_TOLERANCE: f64 = 1e-6;

/// Re-validates a primal point (`||A(x)||_p <= 1 + eps`, `x` in the simplex) or
/// a PSD dual matrix (`||Y||_q = 1`, `<A_i, Y> >= 1 - eps`).
pub fn check_sdp_certificate(inst: &SdpPackingInstance, verdict: &Verdict, eps: f64, p: f64) -> Result<CertificateReport> {
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
            let eig = symmetric_eigen(&inst.combine(x.as_slice()));
            let value = schatten_norm_of_spectrum(&eig.eigenvalues, p);
            let bound = 1.0 + eps;
            report.margin(0, bound - value, || format!("||A(x)||_p = {value} > {bound}"));
            Ok(report)
        }
        Verdict::DualMatrix(y) => {
            if y.dim() != inst.d() {
                return Err(Error::DimensionMismatch {
                    expected: inst.d(),
                    got: y.dim(),
                });
            }
            let mut report = CertificateReport::new("dual");
            let eig = symmetric_eigen(y);
            let lmin = eig.lambda_min();
            if lmin < DUAL_PSD_FLOOR {
                report.fail(format!("dual matrix has eigenvalue {lmin} < {DUAL_PSD_FLOOR}"));
            }
            let yn = schatten_norm_of_spectrum(&eig.eigenvalues, dual_exponent(p));
            if (yn - 1.0).abs() > DUAL_NORM_TOLERANCE {
                report.fail(format!("||Y||_q = {yn}, expected 1"));
            }
            let floor = 1.0 - eps;
            for (i, v) in inst.family().inner_all(y).iter().enumerate() {
                report.margin(i, v - floor, || format!("matrix {i} has <A_i, Y> = {v} < {floor}"));
            }
            Ok(report)
        }
        _ => invalid(format!("no SDP certificate to check for a {} verdict", verdict.label())),
    }
}

/// Checks a boxed-optimizer point: simplex membership, `||x||_inf` within
/// `(1 + eps)(1 + alpha)/n`, and value within `(1 + eps)` of `reference`.
pub fn check_boxed_solution(inst: &SdpPackingInstance, x: &[f64], alpha: f64, eps: f64, p: f64, reference: f64) -> Result<CertificateReport> {
    if x.len() != inst.n() {
        return Err(Error::DimensionMismatch {
            expected: inst.n(),
            got: x.len(),
        });
    }
    let mut report = CertificateReport::new("boxed");
    report.check_simplex(x);
    let cap = (1.0 + eps) * (1.0 + alpha) / inst.n() as f64;
    for (i, &v) in x.iter().enumerate() {
        report.margin(i, cap - v, || format!("weight {i} = {v} exceeds box {cap}"));
    }
    let value = schatten_norm_of_spectrum(&symmetric_eigen(&inst.combine(x)).eigenvalues, p);
    let bound = (1.0 + eps) * reference;
    if value > bound * (1.0 + 1e-12) {
        report.fail(format!("||A(x)||_p = {value} > (1 + eps) * {reference}"));
    }
    Ok(report)
}
