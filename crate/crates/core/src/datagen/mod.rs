//! Synthetic sub-Gaussian datasets with adversarial corruption and the
//! ground truth needed to score recovered directions.

mod corrupt;
mod distribution;
mod instances;
mod io;

pub use corrupt::{corrupt, corrupted_count, AdversaryStrategy, CorruptedDataset};
pub use distribution::{make_spiked_covariance, sample_dataset, DistributionSpec, Family, COVARIANCE_PSD_TOLERANCE};
pub use instances::{random_lp_instance, random_sdp_instance};
pub use io::{read_matrix_csv, sidecar_path, write_matrix_csv, Sidecar};
