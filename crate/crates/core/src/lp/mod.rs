//! Width-independent packing linear programs under `l_inf` and `l_p` norms.

mod certificate;
mod instance;
mod preprocess;
mod solve;

pub use certificate::{check_lp_certificate, DUAL_NORM_TOLERANCE};
pub use instance::LpPackingInstance;
pub use preprocess::preprocess_entry_bound;
pub use solve::{
    linf_iteration_cap, lp_potential, packing_lp_solve, pnorm_iteration_cap, pnorm_packing_solve, solve_lp,
};
