//! Schatten-norm packing semidefinite programs: the width-independent solver,
//! its box-constrained variant, and the binary-search optimizer built on it.

mod boxed;
mod certificate;
mod instance;
mod packing;
mod preprocess;

pub use boxed::{
    boxed_schatten_decide, boxed_schatten_optimize, mixed_gradient, mixed_potential, BoxedConfig, BoxedOptimum,
    OptimizeOptions,
};
pub use certificate::{check_boxed_solution, check_sdp_certificate, DUAL_NORM_TOLERANCE, DUAL_PSD_FLOOR};
pub use instance::{SdpPackingInstance, PSD_TOLERANCE};
pub use packing::{
    schatten_iteration_cap, schatten_packing_solve, sdp_potential, solve_sdp, GradientMode, SchattenOptions,
    SketchOptions,
};
pub use preprocess::preprocess_spectral_bound;
