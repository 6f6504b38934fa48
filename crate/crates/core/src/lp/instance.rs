use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView1};

use crate::error::{invalid, Error, Result};

/// Nonnegative `d x n` matrix `A` of a packing LP. Columns are items, rows
/// are constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct LpPackingInstance {
    a: Array2<f64>,
}

impl LpPackingInstance {
    pub fn new(a: Array2<f64>) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return invalid("packing matrix must be non-empty");
        }
        if a.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return invalid("packing matrix entries must be finite and nonnegative");
        }
        Ok(Self { a })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut a = Array2::zeros((d, n));
        for (j, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            for (i, &x) in row.iter().enumerate() {
                a[[j, i]] = x;
            }
        }
        Self::new(a)
    }

    /// Number of constraint rows.
    pub fn d(&self) -> usize {
        self.a.nrows()
    }

    /// Number of items (columns).
    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.a
    }

    pub fn column(&self, i: usize) -> ArrayView1<'_, f64> {
        self.a.column(i)
    }

    /// `A w`.
    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        self.a.dot(&ArrayView1::from(w)).to_vec()
    }

    /// `A^T v`.
    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        self.a.t().dot(&ArrayView1::from(v)).to_vec()
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self {
            a: self.a.select(ndarray::Axis(1), idx),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { a: &self.a * c }
    }

    /// CSV with a `d,n` header, the two sizes, then `d` rows of `n` entries.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().flexible(true).from_writer(w);
        wr.write_record(["d", "n"])?;
        wr.write_record([self.d().to_string(), self.n().to_string()])?;
        for row in self.a.outer_iter() {
            wr.write_record(row.iter().map(|x| format!("{x:.17e}")))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().flexible(true).has_headers(true).from_reader(r);
        let headers = rd.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "d" || headers[1].trim() != "n" {
            return Err(Error::Parse("expected header `d,n`".into()));
        }
        let mut records = rd.records();
        let sizes = records
            .next()
            .ok_or_else(|| Error::Parse("missing size line".into()))??;
        let parse_usize = |s: &str| s.trim().parse::<usize>().map_err(|e| Error::Parse(format!("bad size `{s}`: {e}")));
        if sizes.len() != 2 {
            return Err(Error::Parse("size line must hold d and n".into()));
        }
        let d = parse_usize(&sizes[0])?;
        let n = parse_usize(&sizes[1])?;
        let mut rows = Vec::with_capacity(d);
        for (line, rec) in records.enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("row {}: bad entry `{s}`: {e}", line + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != n {
                return Err(Error::Parse(format!("row {} has {} entries, expected {n}", line + 1, row.len())));
            }
            rows.push(row);
        }
        if rows.len() != d {
            return Err(Error::Parse(format!("found {} rows, expected {d}", rows.len())));
        }
        Self::from_rows(&rows)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}
