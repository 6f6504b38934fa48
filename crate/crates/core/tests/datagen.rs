use proptest::prelude::*;
use schatten_core::datagen::{
    corrupt, corrupted_count, make_spiked_covariance, sample_dataset, AdversaryStrategy, CorruptedDataset,
    DistributionSpec,
};
use schatten_core::linalg::{symmetric_eigen, SymMatrix};

fn empirical_covariance(x: &ndarray::Array2<f64>) -> SymMatrix {
    let n = x.nrows() as f64;
    SymMatrix::new(x.t().dot(x) / n).unwrap()
}

fn spectral_gap(a: &SymMatrix, b: &SymMatrix) -> f64 {
    let e = symmetric_eigen(&a.sub(b));
    e.lambda_max().abs().max(e.lambda_min().abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn corrupt_preserves_shape_and_good_rows(n in 2usize..200, d in 1usize..6, eps in 0.0f64..0.45, seed in any::<u64>()) {
        let spec = make_spiked_covariance(d, 4.0, 1.0, 1).unwrap();
        let clean = sample_dataset(&spec, n, seed).unwrap();
        let mut dir = vec![0.0; d];
        dir[0] = 1.0;
        let strategy = AdversaryStrategy::DirectionSpike { direction: dir, magnitude: 7.0 };
        prop_assume!(corrupted_count(n, eps) < n);
        let data = corrupt(clean.clone(), &spec, eps, &strategy, seed ^ 9).unwrap();
        prop_assert_eq!(data.samples.dim(), (n, d));
        prop_assert_eq!(data.bad_indices.len(), (eps * n as f64 - 1e-9).ceil() as usize);
        for i in data.good_indices() {
            prop_assert_eq!(data.samples.row(i), clean.row(i));
        }
        for &i in &data.bad_indices {
            prop_assert_eq!(data.samples[[i, 0]], 7.0);
        }
    }
}

#[test]
fn direction_spike_places_exact_copies() {
    let spec = make_spiked_covariance(20, 10.0, 1.0, 1).unwrap();
    let mut e2 = vec![0.0; 20];
    e2[1] = 1.0;
    let strategy = AdversaryStrategy::DirectionSpike { direction: e2.clone(), magnitude: 12.0 };
    let data = corrupt(sample_dataset(&spec, 5000, 0).unwrap(), &spec, 0.05, &strategy, 1).unwrap();
    assert_eq!(data.bad_indices.len(), 250);
    let spike: Vec<f64> = e2.iter().map(|v| 12.0 * v).collect();
    let copies = data.samples.rows().into_iter().filter(|r| r.to_vec() == spike).count();
    assert_eq!(copies, 250);
}

#[test]
fn identity_adversary_leaves_points() {
    let spec = make_spiked_covariance(3, 2.0, 1.0, 1).unwrap();
    let clean = sample_dataset(&spec, 50, 3).unwrap();
    let data = corrupt(clean.clone(), &spec, 0.1, &AdversaryStrategy::None, 4).unwrap();
    assert_eq!(data.samples, clean);
    assert_eq!(data.bad_indices.len(), 5);
}

#[test]
fn corrupt_rejects_total_corruption() {
    let spec = make_spiked_covariance(2, 2.0, 1.0, 1).unwrap();
    let clean = sample_dataset(&spec, 10, 0).unwrap();
    assert!(corrupt(clean, &spec, 1.0, &AdversaryStrategy::None, 0).is_err());
}

#[test]
fn sample_covariance_converges_at_large_n() {
    let identity = DistributionSpec::gaussian(SymMatrix::identity(3)).unwrap();
    let x = sample_dataset(&identity, 100_000, 11).unwrap();
    assert!(spectral_gap(&empirical_covariance(&x), &SymMatrix::identity(3)) <= 0.05);

    let diag = DistributionSpec::gaussian(SymMatrix::from_diag(&[4.0, 1.0])).unwrap();
    let x = sample_dataset(&diag, 100_000, 12).unwrap();
    let top = symmetric_eigen(&empirical_covariance(&x)).lambda_max();
    assert!((3.8..=4.2).contains(&top), "{top}");
}

#[test]
fn covariance_error_shrinks_like_root_d_over_n() {
    let spec = make_spiked_covariance(8, 10.0, 1.0, 1).unwrap();
    let mean_error = |n: usize| {
        (0..10u64)
            .map(|s| spectral_gap(&empirical_covariance(&sample_dataset(&spec, n, s).unwrap()), &spec.covariance))
            .sum::<f64>()
            / 10.0
    };
    let (small, large) = (mean_error(1_000), mean_error(16_000));
    let ratio = small / large;
    assert!((2.0..=8.0).contains(&ratio), "ratio {ratio}, expected near 4");
}

#[test]
fn zero_covariance_gives_zero_rows() {
    let spec = DistributionSpec::gaussian(SymMatrix::zeros(3)).unwrap();
    assert!(sample_dataset(&spec, 5, 0).unwrap().iter().all(|&v| v == 0.0));
}

#[test]
fn spiked_covariance_has_requested_multiplicity() {
    let spec = make_spiked_covariance(20, 10.0, 1.0, 3).unwrap();
    let eig = symmetric_eigen(&spec.covariance).eigenvalues;
    assert_eq!(eig.iter().filter(|&&l| (l - 10.0).abs() < 1e-12).count(), 3);
    assert!(make_spiked_covariance(4, 1.0, 2.0, 1).is_err());
}

#[test]
fn dataset_round_trips_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let spec = make_spiked_covariance(3, 5.0, 1.0, 1).unwrap();
    let data = corrupt(sample_dataset(&spec, 30, 0).unwrap(), &spec, 0.1, &AdversaryStrategy::None, 1).unwrap();
    let path = dir.path().join("x.csv");
    data.save(&path).unwrap();
    let back = CorruptedDataset::load(&path).unwrap();
    assert_eq!(back.samples, data.samples);
    assert_eq!(back.bad_indices, data.bad_indices);
}
