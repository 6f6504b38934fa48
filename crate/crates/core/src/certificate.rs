use serde::{Deserialize, Serialize};

/// Outcome of re-validating a primal point or dual certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub passed: bool,
    pub kind: String,
    /// Coordinate with the smallest margin, when the check is coordinatewise.
    pub worst_index: Option<usize>,
    /// Margin at the worst coordinate; negative means violated.
    pub worst_margin: f64,
    pub violations: Vec<String>,
}

impl CertificateReport {
    pub(crate) fn new(kind: &str) -> Self {
        Self {
            passed: true,
            kind: kind.to_string(),
            worst_index: None,
            worst_margin: f64::INFINITY,
            violations: Vec::new(),
        }
    }

    pub(crate) fn fail(&mut self, msg: String) {
        self.passed = false;
        self.violations.push(msg);
    }

    /// Tracks the smallest `margin` seen and fails when it is negative.
    pub(crate) fn margin(&mut self, index: usize, margin: f64, describe: impl FnOnce() -> String) {
        if margin < self.worst_margin {
            self.worst_margin = margin;
            self.worst_index = Some(index);
        }
        if margin < 0.0 {
            self.fail(describe());
        }
    }

    pub(crate) fn check_simplex(&mut self, x: &[f64]) {
        if let Some(i) = x.iter().position(|&v| v < 0.0) {
            self.fail(format!("coordinate {i} is negative"));
        }
        let s: f64 = x.iter().sum();
        if (s - 1.0).abs() > crate::weights::SIMPLEX_TOLERANCE {
            self.fail(format!("weights sum to {s}, not 1"));
        }
    }
}
