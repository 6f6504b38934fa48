use std::path::Path;

use anyhow::{bail, Context, Result};
use schatten_core::datagen::CorruptedDataset;
use schatten_core::lp::{check_lp_certificate, preprocess_entry_bound, LpPackingInstance};
use schatten_core::sdp::{check_boxed_solution, check_sdp_certificate, preprocess_spectral_bound, SdpPackingInstance};
use schatten_core::Error;

use crate::config::parse_order;
use crate::results::{describe_report, read_results, Solution, StoredRow};
use crate::tasks::resolve_stored;

/// Outcome of re-validating one stored row.
pub struct RowCheck {
    pub line: usize,
    pub passed: bool,
    pub detail: String,
}

/// Re-validates every row of a results file against its stored solution and
/// instance.
pub fn check_results(path: &Path) -> Result<Vec<RowCheck>> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let rows = read_results(path)?;
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let (passed, detail) =
                check_row(dir, row).with_context(|| format!("{}: row {}", path.display(), i + 2))?;
            Ok(RowCheck {
                line: i + 2,
                passed,
                detail,
            })
        })
        .collect()
}

fn check_row(dir: &Path, row: &StoredRow) -> Result<(bool, String)> {
    let solution = Solution::load(&resolve_stored(dir, &row.solution))?;
    let instance = resolve_stored(dir, &row.instance);
    let (mut passed, mut detail) = match &solution {
        Solution::PackingLp { eps, p, verdict } => {
            let inst = LpPackingInstance::load(&instance)?;
            let r = check_lp_certificate(&inst, verdict, *eps, parse_order(p)?)?;
            (r.passed, describe_report(&r))
        }
        Solution::PackingSdp { eps, p, verdict } => {
            let inst = SdpPackingInstance::load_dir(&instance)?;
            let r = check_sdp_certificate(&inst, verdict, *eps, parse_order(p)?)?;
            (r.passed, describe_report(&r))
        }
        Solution::Boxed {
            eps,
            p,
            alpha,
            x,
            certified_lower,
            ..
        } => {
            let inst = SdpPackingInstance::load_dir(&instance)?;
            let r = check_boxed_solution(&inst, x.as_slice(), *alpha, *eps, parse_order(p)?, *certified_lower)?;
            (r.passed, describe_report(&r))
        }
        Solution::FilterPca {
            eps,
            direction,
            weights,
            weight_monotone,
        } => {
            let mass = 1.0 - weights.l1();
            let cap = 2.0 * eps + 1.0 / weights.len() as f64;
            let ok = *weight_monotone && mass <= cap + 1e-12 && unit(direction);
            (ok, format!("filter: removed mass {mass:.6} (cap {cap:.6}), monotone {weight_monotone}"))
        }
        Solution::FastPca {
            eps,
            direction,
            weights,
            ..
        } => {
            let cap = (1.0 + eps).powi(2) / weights.len() as f64;
            let ok = weights.is_simplex() && weights.max() <= cap * (1.0 + 1e-9) && unit(direction);
            (ok, format!("fast: max weight {:.6e} (cap {cap:.6e})", weights.max()))
        }
        Solution::Naive { direction } => (unit(direction), "naive baseline".into()),
        Solution::PreprocessedAway { eps } => {
            let dropped = if row.task == "packing-lp" {
                preprocess_entry_bound(&LpPackingInstance::load(&instance)?, *eps)
                    .err()
                    .is_some_and(|e| matches!(e, Error::InfeasibleAfterPreprocessing))
            } else {
                preprocess_spectral_bound(&SdpPackingInstance::load_dir(&instance)?, *eps)
                    .err()
                    .is_some_and(|e| matches!(e, Error::InfeasibleAfterPreprocessing))
            };
            (dropped, format!("preprocessing drops every item: {dropped}"))
        }
    };
    if row.check != if passed { "pass" } else { "fail" } {
        detail.push_str(&format!("; stored check {:?} disagrees", row.check));
        passed = false;
    }
    if let (Some(u), false) = (direction_of(&solution), row.score.is_empty()) {
        if let Ok(data) = CorruptedDataset::load(&instance) {
            let score = data.score(u);
            let stored: f64 = row.score.parse().context("score column")?;
            if (score - stored).abs() > 1e-12 * stored.abs().max(1.0) {
                passed = false;
                detail.push_str(&format!("; score {score} differs from stored {stored}"));
            }
        }
    }
    if row.task.is_empty() || row.method.is_empty() {
        bail!("row is missing task or method");
    }
    Ok((passed, detail))
}

fn direction_of(s: &Solution) -> Option<&[f64]> {
    match s {
        Solution::FilterPca { direction, .. } | Solution::FastPca { direction, .. } | Solution::Naive { direction } => {
            Some(direction)
        }
        _ => None,
    }
}

fn unit(u: &[f64]) -> bool {
    (u.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs() <= 1e-8
}
