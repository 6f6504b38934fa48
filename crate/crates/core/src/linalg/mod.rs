//! Dense symmetric linear algebra: Schatten norms, eigendecompositions,
//! block power iteration, JL trace sketches and sample-based operators.

pub mod eigen;
pub mod family;
pub mod operator;
pub mod power;
pub mod schatten;
pub mod sketch;
pub mod sym;

pub use eigen::{symmetric_eigen, symmetric_eigen_warm, SpectralDecomposition};
pub use family::PsdFamily;
pub use operator::{weighted_gram_apply, SymOperator, WeightedGram};
pub use power::{simultaneous_power_iteration, PowerConfig, PowerResult};
pub use schatten::{dual_exponent, odd_order, schatten_dual_witness, schatten_norm, vector_pnorm};
pub use sketch::{jl_inner_products, jl_trace_estimate, JlSketch};
pub use sym::SymMatrix;
