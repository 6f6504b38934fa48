use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{PsdFamily, SymMatrix};

/// Default eigenvalue tolerance, relative to the largest entry, for PSD checks.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// A family of PSD matrices defining a Schatten packing problem
/// `min_{x in simplex} || sum_i x_i A_i ||_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpPackingInstance {
    family: PsdFamily,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    n: usize,
    d: usize,
    psd_tolerance: f64,
    #[serde(default)]
    files: Vec<String>,
}

impl SdpPackingInstance {
    pub fn new(matrices: Vec<SymMatrix>) -> Result<Self> {
        Self::with_tolerance(matrices, PSD_TOLERANCE)
    }

    pub fn with_tolerance(matrices: Vec<SymMatrix>, tol: f64) -> Result<Self> {
        Ok(Self {
            family: PsdFamily::dense(matrices, tol)?,
        })
    }

    /// The rank-one family `A_i = X_i X_i^T` over the rows of `samples`.
    pub fn from_samples(samples: Array2<f64>) -> Result<Self> {
        Ok(Self {
            family: PsdFamily::rank_one(samples)?,
        })
    }

    pub fn from_family(family: PsdFamily) -> Self {
        Self { family }
    }

    pub fn family(&self) -> &PsdFamily {
        &self.family
    }

    pub fn n(&self) -> usize {
        self.family.len()
    }

    pub fn d(&self) -> usize {
        self.family.dim()
    }

    /// `sum_i w_i A_i`.
    pub fn combine(&self, w: &[f64]) -> SymMatrix {
        self.family.combine(w)
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            family: self.family.subset(indices),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            family: self.family.scaled(c),
        }
    }

    /// Writes `A_<i>.csv` files plus `manifest.json` into `dir`.
    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut files = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            let name = format!("A_{i}.csv");
            let mut wr = csv::WriterBuilder::new().has_headers(false).from_path(dir.join(&name))?;
            let m = self.family.matrix(i);
            for row in m.as_array().outer_iter() {
                wr.write_record(row.iter().map(|x| format!("{x:.17e}")))?;
            }
            wr.flush()?;
            files.push(name);
        }
        let manifest = Manifest {
            n: self.n(),
            d: self.d(),
            psd_tolerance: PSD_TOLERANCE,
            files,
        };
        std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }

    pub fn load_dir(dir: &Path) -> Result<Self> {
        let manifest: Manifest = serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json"))?)?;
        let files = if manifest.files.is_empty() {
            (0..manifest.n).map(|i| format!("A_{i}.csv")).collect()
        } else {
            manifest.files
        };
        if files.len() != manifest.n {
            return Err(Error::Parse(format!(
                "manifest lists {} files but n = {}",
                files.len(),
                manifest.n
            )));
        }
        let mut matrices = Vec::with_capacity(manifest.n);
        for name in &files {
            let mut rd = csv::ReaderBuilder::new().has_headers(false).from_path(dir.join(name))?;
            let mut rows = Vec::new();
            for rec in rd.records() {
                let rec = rec?;
                let row = rec
                    .iter()
                    .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{name}: `{s}`: {e}"))))
                    .collect::<Result<Vec<f64>>>()?;
                rows.push(row);
            }
            if rows.len() != manifest.d {
                return Err(Error::Parse(format!("{name} has {} rows, expected {}", rows.len(), manifest.d)));
            }
            matrices.push(SymMatrix::from_rows(&rows)?);
        }
        if !(manifest.psd_tolerance >= 0.0) {
            return invalid("psd_tolerance must be nonnegative");
        }
        Self::with_tolerance(matrices, manifest.psd_tolerance)
    }
}
