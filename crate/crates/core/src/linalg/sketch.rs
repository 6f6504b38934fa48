use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::family::PsdFamily;
use super::operator::SymOperator;
use crate::error::{invalid, Error, Result};

/// Gaussian Johnson-Lindenstrauss sketch: a `k x d` matrix with i.i.d.
/// `N(0, 1/k)` entries, generated deterministically from `seed`.
#[derive(Debug, Clone)]
pub struct JlSketch {
    rows: usize,
    seed: u64,
    projection: Array2<f64>,
}

impl JlSketch {
    /// `ceil(c_jl * ln(nd/eps) / eps^2)`.
    pub fn rows_for(n: usize, d: usize, eps: f64, c_jl: f64) -> usize {
        let k = (c_jl * ((n * d) as f64 / eps).ln() / (eps * eps)).ceil();
        (k as usize).max(1)
    }

    pub fn new(n: usize, d: usize, eps: f64, c_jl: f64, seed: u64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return invalid(format!("sketch accuracy {eps} must lie in (0, 1)"));
        }
        if n == 0 || d == 0 || !(c_jl > 0.0) {
            return invalid("sketch needs positive n, d and c_jl");
        }
        Ok(Self::with_rows(Self::rows_for(n, d, eps, c_jl), d, seed))
    }

    pub fn with_rows(rows: usize, d: usize, seed: u64) -> Self {
        let rows = rows.max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, (1.0 / rows as f64).sqrt()).expect("positive variance");
        let projection = Array2::from_shape_fn((rows, d), |_| normal.sample(&mut rng));
        Self {
            rows,
            seed,
            projection,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.projection.ncols()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn projection(&self) -> &Array2<f64> {
        &self.projection
    }
}

/// The sketch rows pushed through `M^h` once, shared by the trace and
/// inner-product estimates.
pub(crate) struct SketchedPowers {
    /// `d x k`, column `l` is `M^h q_l`.
    pub block: Array2<f64>,
    /// `M` applied to `block`.
    pub applied: Array2<f64>,
}

impl SketchedPowers {
    pub fn new(op: &dyn SymOperator, half_power: u32, sketch: &JlSketch) -> Result<Self> {
        if sketch.dim() != op.dim() {
            return Err(Error::DimensionMismatch {
                expected: op.dim(),
                got: sketch.dim(),
            });
        }
        let mut block = sketch.projection.t().to_owned();
        for _ in 0..half_power {
            block = op.apply_block(block.view());
        }
        let applied = op.apply_block(block.view());
        Ok(Self { block, applied })
    }

    /// `sum_l b_l^T M b_l`, the estimate of `Tr(M^{2h+1})`.
    pub fn odd_trace(&self) -> f64 {
        self.block.iter().zip(self.applied.iter()).map(|(a, b)| a * b).sum()
    }

    /// `sum_l |b_l|^2`, the estimate of `Tr(M^{2h})`.
    pub fn even_trace(&self) -> f64 {
        self.block.iter().map(|a| a * a).sum()
    }
}

/// `sum_l q_l^T M^p q_l` over the sketch rows, an unbiased estimate of `Tr(M^p)`.
pub fn jl_trace_estimate(op: &dyn SymOperator, p: u32, sketch: &JlSketch) -> Result<f64> {
    if p == 0 {
        return invalid("trace power must be positive");
    }
    if p % 2 == 0 {
        Ok(SketchedPowers::new(op, p / 2, sketch)?.even_trace())
    } else {
        Ok(SketchedPowers::new(op, (p - 1) / 2, sketch)?.odd_trace())
    }
}

/// Estimates `<A_i, M^{p-1}>` for every member of `family` as
/// `sum_l b_l^T A_i b_l` with `b_l = M^{(p-1)/2} q_l`.
pub fn jl_inner_products(family: &PsdFamily, op: &dyn SymOperator, p: u32, sketch: &JlSketch) -> Result<Vec<f64>> {
    if p % 2 == 0 {
        return Err(Error::UnsupportedOrder(p as f64));
    }
    if family.dim() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            got: family.dim(),
        });
    }
    let powers = SketchedPowers::new(op, (p - 1) / 2, sketch)?;
    Ok(family.quad_forms_block(powers.block.view()))
}
