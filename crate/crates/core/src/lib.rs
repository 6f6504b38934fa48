//! Width-independent Schatten-norm packing solvers and robust PCA for
//! sub-Gaussian data under adversarial corruption.
//!
//! The crate is organised bottom-up: [`linalg`] provides symmetric matrix
//! primitives, [`lp`] and [`sdp`] the packing solvers built on them, [`robust`]
//! the two robust PCA algorithms, and [`datagen`] synthetic corrupted datasets
//! with known ground truth.

pub mod certificate;
pub mod datagen;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod outcome;
pub mod reduction;
pub mod robust;
pub mod sdp;
pub mod weights;

pub use certificate::CertificateReport;
pub use error::{Error, Result};
pub use outcome::{potential_increases, IterationRecord, SolveOutcome, Verdict};
pub use weights::WeightVector;
