use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use schatten_core::{CertificateReport, Verdict, WeightVector};
use serde::{Deserialize, Serialize};

/// Column order of `results.csv`.
pub const COLUMNS: [&str; 15] = [
    "task",
    "method",
    "seed",
    "n",
    "d",
    "eps",
    "p",
    "verdict",
    "score",
    "iterations",
    "iteration_cap",
    "check",
    "wall_time_s",
    "instance",
    "solution",
];

/// Verdict label when preprocessing drops every item.
pub const PREPROCESSED_AWAY: &str = "infeasible-after-preprocessing";

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub task: String,
    pub method: String,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub eps: f64,
    pub p: String,
    pub verdict: String,
    /// `NaN` when there is nothing to score.
    pub score: f64,
    pub iterations: usize,
    pub iteration_cap: Option<usize>,
    pub check: bool,
    pub wall_time_s: f64,
    /// Paths relative to the output directory, or absolute for user files.
    pub instance: String,
    pub solution: String,
}

impl ResultRow {
    fn sort_key(&self) -> (String, u64, u64, String) {
        (self.task.clone(), self.eps.to_bits(), self.seed, self.method.clone())
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.task.clone(),
            self.method.clone(),
            self.seed.to_string(),
            self.n.to_string(),
            self.d.to_string(),
            fmt_float(self.eps),
            self.p.clone(),
            self.verdict.clone(),
            fmt_float(self.score),
            self.iterations.to_string(),
            self.iteration_cap.map(|c| c.to_string()).unwrap_or_default(),
            if self.check { "pass" } else { "fail" }.into(),
            fmt_float(self.wall_time_s),
            self.instance.clone(),
            self.solution.clone(),
        ]
    }
}

/// Writes rows sorted by task, eps, seed and method.
pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut sorted = rows.to_vec();
    sorted.sort_by_key(|r| r.sort_key());
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(COLUMNS)?;
    for r in &sorted {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

/// One row of a results file, as read back by `check`.
#[derive(Debug, Clone, Deserialize)]
pub struct StoredRow {
    pub task: String,
    pub method: String,
    pub score: String,
    pub check: String,
    pub instance: String,
    pub solution: String,
}

pub fn read_results(path: &Path) -> Result<Vec<StoredRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let headers: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if headers != COLUMNS {
        anyhow::bail!("{}: unexpected header {headers:?}", path.display());
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.with_context(|| format!("{}: row {}", path.display(), i + 2)))
        .collect()
}

/// What each run leaves behind for re-validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case")]
pub enum Solution {
    PackingLp {
        eps: f64,
        p: String,
        verdict: Verdict,
    },
    PackingSdp {
        eps: f64,
        p: String,
        verdict: Verdict,
    },
    Boxed {
        eps: f64,
        p: String,
        alpha: f64,
        x: WeightVector,
        value: f64,
        certified_lower: f64,
    },
    FilterPca {
        eps: f64,
        direction: Vec<f64>,
        weights: WeightVector,
        weight_monotone: bool,
    },
    FastPca {
        eps: f64,
        order: u32,
        direction: Vec<f64>,
        weights: WeightVector,
    },
    Naive {
        direction: Vec<f64>,
    },
    PreprocessedAway {
        eps: f64,
    },
}

impl Solution {
    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(f, self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CheckCounts {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub task: String,
    pub config: serde_json::Value,
    pub rows: usize,
    pub certificate_checks: CheckCounts,
    /// Violations by invariant name; all names are present, zero or not.
    pub invariant_violations: BTreeMap<String, usize>,
    /// Named row counts, such as rows whose score clears `1 - gamma`.
    pub counts: BTreeMap<String, usize>,
    /// Failed certificate checks, one line each.
    pub failures: Vec<String>,
    pub all_checks_passed: bool,
}

impl Summary {
    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(f, self)?;
        Ok(())
    }
}

pub fn describe_report(r: &CertificateReport) -> String {
    if r.passed {
        format!("{} ok", r.kind)
    } else {
        format!("{}: {}", r.kind, r.violations.join("; "))
    }
}
