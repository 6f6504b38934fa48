use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

use super::corrupt::CorruptedDataset;

/// Ground-truth metadata stored next to a sample CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub n: usize,
    pub d: usize,
    pub eps: f64,
    pub seed: u64,
    pub bad_indices: Vec<usize>,
    /// Covariance CSV, relative to the sidecar's directory.
    pub sigma_file: String,
    #[serde(default = "unit_scale")]
    pub proxy_scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

/// `data.csv` -> `data.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes a headerless numeric CSV, one row per line, shortest round-trip floats.
pub fn write_matrix_csv(path: &Path, m: &Array2<f64>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for row in m.outer_iter() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix_csv(path: &Path) -> Result<Array2<f64>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut data = Vec::new();
    let mut cols = None;
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        if cols.is_some_and(|c| c != rec.len()) {
            return Err(Error::Parse(format!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                line + 1,
                rec.len(),
                cols.unwrap_or(0)
            )));
        }
        cols = Some(rec.len());
        for field in rec.iter() {
            data.push(field.parse::<f64>().map_err(|e| {
                Error::Parse(format!("{}: row {}: {field:?}: {e}", path.display(), line + 1))
            })?);
        }
    }
    let cols = cols.ok_or_else(|| Error::Parse(format!("{}: no rows", path.display())))?;
    let rows = data.len() / cols;
    Array2::from_shape_vec((rows, cols), data).map_err(|e| Error::Parse(e.to_string()))
}

impl CorruptedDataset {
    /// Writes `path` (samples), its JSON sidecar, and the covariance as
    /// `<stem>.sigma.csv`.
    pub fn save(&self, path: &Path) -> Result<()> {
        write_matrix_csv(path, &self.samples)?;
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::InvalidInput(format!("bad dataset path {}", path.display())))?;
        let sigma_file = format!("{stem}.sigma.csv");
        write_matrix_csv(&path.with_file_name(&sigma_file), &self.covariance.as_array().to_owned())?;
        let side = Sidecar {
            n: self.n(),
            d: self.d(),
            eps: self.eps,
            seed: self.seed,
            bad_indices: self.bad_indices.clone(),
            sigma_file,
            proxy_scale: self.proxy_scale,
        };
        serde_json::to_writer_pretty(File::create(sidecar_path(path))?, &side)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let samples = read_matrix_csv(path)?;
        let side: Sidecar = serde_json::from_reader(BufReader::new(File::open(sidecar_path(path))?))?;
        if side.n != samples.nrows() || side.d != samples.ncols() {
            return Err(Error::Parse(format!(
                "sidecar says {}x{}, samples are {}x{}",
                side.n,
                side.d,
                samples.nrows(),
                samples.ncols()
            )));
        }
        if side.bad_indices.iter().any(|&i| i >= side.n) {
            return Err(Error::Parse("bad index out of range".into()));
        }
        let covariance = SymMatrix::new(read_matrix_csv(&path.with_file_name(&side.sigma_file))?)?;
        if covariance.dim() != side.d {
            return Err(Error::DimensionMismatch { expected: side.d, got: covariance.dim() });
        }
        Ok(Self {
            samples,
            eps: side.eps,
            seed: side.seed,
            bad_indices: side.bad_indices,
            covariance,
            proxy_scale: side.proxy_scale,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{corrupt, make_spiked_covariance, sample_dataset, AdversaryStrategy};

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let spec = make_spiked_covariance(4, 3.0, 1.0, 1).unwrap();
        let x = sample_dataset(&spec, 30, 5).unwrap();
        let c = corrupt(x, &spec, 0.1, &AdversaryStrategy::MirrorGood { scale: 2.0 }, 6).unwrap();
        let path = dir.path().join("data.csv");
        c.save(&path).unwrap();
        assert!(dir.path().join("data.json").exists());
        assert!(dir.path().join("data.sigma.csv").exists());
        assert_eq!(CorruptedDataset::load(&path).unwrap(), c);
    }

    #[test]
    fn ragged_csv_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "1,2\n3\n").unwrap();
        assert!(read_matrix_csv(&path).is_err());
    }
}
