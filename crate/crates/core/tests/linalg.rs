use ndarray::Array2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schatten_core::linalg::{
    jl_trace_estimate, schatten_dual_witness, schatten_norm, simultaneous_power_iteration, symmetric_eigen,
    weighted_gram_apply, JlSketch, PowerConfig, SymMatrix, SymOperator, WeightedGram,
};

fn random_psd(d: usize, rank: usize, seed: u64) -> SymMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Array2::from_shape_fn((d, rank), |_| rng.gen_range(-1.0..1.0));
    SymMatrix::new(g.dot(&g.t())).unwrap()
}

/// `Tr(M^p)` by repeated dense multiplication.
fn trace_power(m: &SymMatrix, p: u32) -> f64 {
    let a = m.as_array().to_owned();
    let mut acc = Array2::<f64>::eye(m.dim());
    for _ in 0..p {
        acc = acc.dot(&a);
    }
    acc.diag().sum()
}

fn quad_power(m: &SymMatrix, z: &[f64], p: u32) -> f64 {
    let mut v = z.to_vec();
    for _ in 0..p {
        v = m.matvec(&v);
    }
    z.iter().zip(&v).map(|(a, b)| a * b).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn dual_witness_attains_the_norm(d in 1usize..8, rank in 1usize..8, seed in any::<u64>(), p in prop_oneof![Just(3.0), Just(5.0)]) {
        let m = random_psd(d, rank, seed);
        let norm = schatten_norm(&m, p).unwrap();
        prop_assume!(norm > 1e-9);
        let w = schatten_dual_witness(&m, p).unwrap();
        prop_assert!((w.inner(&m) - norm).abs() <= 1e-6 * norm);
        let q = p / (p - 1.0);
        prop_assert!((schatten_norm(&w, q).unwrap() - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn odd_schatten_norm_matches_trace_power(d in 1usize..8, seed in any::<u64>(), p in prop_oneof![Just(3u32), Just(5u32)]) {
        let m = random_psd(d, d, seed);
        let oracle = trace_power(&m, p).powf(1.0 / p as f64);
        prop_assert!((schatten_norm(&m, p as f64).unwrap() - oracle).abs() <= 1e-9 * oracle.max(1.0));
    }

    #[test]
    fn infinity_norm_is_top_eigenvalue(d in 1usize..8, seed in any::<u64>()) {
        let m = random_psd(d, 3, seed);
        let top = symmetric_eigen(&m).lambda_max();
        prop_assert!((schatten_norm(&m, f64::INFINITY).unwrap() - top).abs() <= 1e-12 * top.max(1.0));
    }

    #[test]
    fn schatten_norm_is_loewner_monotone(d in 1usize..8, seed in any::<u64>(), p in prop_oneof![Just(2.0), Just(3.0), Just(5.0), Just(f64::INFINITY)]) {
        let b = random_psd(d, 2, seed);
        let mut a = b.clone();
        a.add_scaled(1.0, &random_psd(d, 1, seed ^ 0x5eed));
        prop_assert!(schatten_norm(&a, p).unwrap() >= schatten_norm(&b, p).unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn eigen_reconstructs_the_matrix(d in 1usize..10, seed in any::<u64>()) {
        let m = random_psd(d, d, seed);
        let eig = symmetric_eigen(&m);
        prop_assert!(eig.reconstruct().sub(&m).max_abs() <= 1e-10 * m.max_abs().max(1.0));
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn weighted_gram_matches_dense(n in 1usize..20, d in 1usize..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, d), |_| rng.gen_range(-2.0..2.0));
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut dense = SymMatrix::zeros(d);
        for i in 0..n {
            dense.add_outer(w[i], x.row(i).as_slice().unwrap());
        }
        let got = weighted_gram_apply(x.view(), &w, &v).unwrap();
        for (a, b) in got.iter().zip(dense.matvec(&v)) {
            prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
        }
    }
}

#[test]
fn power_iteration_meets_both_power_bounds() {
    for seed in 0..12u64 {
        let d = [4, 10, 25, 50][seed as usize % 4];
        let p = [3u32, 5][seed as usize % 2];
        let t = 1 + seed as usize % 3;
        // spectral gap keeps the top t eigenvalues resolvable
        let mut m = random_psd(d, 2, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        for j in 0..t {
            let mut v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= n);
            m.add_outer(20.0 * (t - j) as f64, &v);
        }
        let eps_tilde = 0.05;
        let res = simultaneous_power_iteration(&m, t, p, eps_tilde, seed, &PowerConfig::default()).unwrap();
        let eig = symmetric_eigen(&m);
        for j in 0..t {
            let z = res.vector(j);
            let lam = eig.eigenvalues[j];
            let hi = quad_power(&m, &z, p);
            let lo = quad_power(&m, &z, p - 1);
            assert!((hi - lam.powi(p as i32)).abs() <= eps_tilde * lam.powi(p as i32), "seed {seed} j {j}");
            assert!((lo - lam.powi(p as i32 - 1)).abs() <= eps_tilde * lam.powi(p as i32 - 1), "seed {seed} j {j}");
        }
        for a in 0..t {
            for b in 0..t {
                let dot: f64 = res.vector(a).iter().zip(res.vector(b)).map(|(x, y)| x * y).sum();
                assert!((dot - if a == b { 1.0 } else { 0.0 }).abs() <= 1e-10);
            }
        }
        assert_eq!(res.applications % (p as usize * (p as usize - 1)), 0);
    }
}

#[test]
fn power_iteration_on_identity_is_exact() {
    let m = SymMatrix::identity(5);
    let res = simultaneous_power_iteration(&m, 2, 3, 0.1, 7, &PowerConfig::default()).unwrap();
    for j in 0..2 {
        assert!((quad_power(&m, &res.vector(j), 3) - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn power_iteration_rejects_bad_rank() {
    let m = SymMatrix::identity(3);
    assert!(simultaneous_power_iteration(&m, 4, 3, 0.1, 0, &PowerConfig::default()).is_err());
    assert!(simultaneous_power_iteration(&m, 0, 3, 0.1, 0, &PowerConfig::default()).is_err());
}

#[test]
fn jl_trace_estimate_is_unbiased() {
    let m = random_psd(8, 8, 42).scaled(0.5);
    let exact = trace_power(&m, 3);
    let samples: Vec<f64> = (0..1000u64)
        .map(|s| jl_trace_estimate(&m, 3, &JlSketch::with_rows(4, 8, s)).unwrap())
        .collect();
    let mean = samples.iter().sum::<f64>() / 1000.0;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 999.0;
    let se = (var / 1000.0).sqrt();
    assert!((mean - exact).abs() <= 3.0 * se, "mean {mean}, exact {exact}, se {se}");
}

#[test]
fn jl_trace_examples() {
    let id = SymMatrix::identity(8);
    let est = jl_trace_estimate(&id, 3, &JlSketch::with_rows(200, 8, 1)).unwrap();
    assert!((6.0..=10.0).contains(&est));
    let m = random_psd(12, 12, 9);
    let exact = trace_power(&m, 5);
    let sketch = JlSketch::new(1, 12, 0.25, 16.0, 3).unwrap();
    let est = jl_trace_estimate(&m, 5, &sketch).unwrap();
    assert!((est / exact - 1.0).abs() <= 0.25, "{est} vs {exact}");
}

#[test]
fn weighted_gram_operator_applies_block() {
    let x = Array2::from_shape_vec((3, 3), vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
    let w = vec![1.0 / 3.0; 3];
    let op = WeightedGram::new(x.view(), &w).unwrap();
    let got = op.apply(&[1.0, 1.0, 1.0]);
    assert!(got.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
}
