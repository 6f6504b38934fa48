use proptest::prelude::*;
use schatten_core::datagen::{random_lp_instance, random_sdp_instance};
use schatten_core::linalg::{dual_exponent, vector_pnorm};
use schatten_core::lp::{check_lp_certificate, solve_lp, LpPackingInstance};
use schatten_core::sdp::{
    boxed_schatten_decide, boxed_schatten_optimize, check_sdp_certificate, solve_sdp, BoxedConfig, OptimizeOptions,
    SchattenOptions,
};
use schatten_core::{potential_increases, Error, Verdict};

fn finite_order() -> impl Strategy<Value = f64> {
    prop_oneof![Just(2.0), Just(3.0), Just(5.0)]
}

fn accuracy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.1), Just(0.25)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pnorm_certificates_are_valid(n in 1usize..8, d in 1usize..8, seed in any::<u64>(), p in finite_order(), eps in accuracy(), scale in 0.1f64..4.0) {
        let inst = random_lp_instance(n, d, scale, seed).unwrap();
        let out = solve_lp(&inst, eps, p).unwrap();
        let report = check_lp_certificate(&inst, &out.verdict, eps, p).unwrap();
        prop_assert!(report.passed, "{:?}", report.violations);
        prop_assert!(out.iterations <= out.iteration_cap);
        prop_assert_eq!(potential_increases(&out.trace, 1e-9), 0);
    }

    #[test]
    fn linf_primal_is_valid_and_dual_is_a_distribution(n in 1usize..8, d in 1usize..8, seed in any::<u64>(), eps in accuracy(), scale in 0.1f64..4.0) {
        let inst = random_lp_instance(n, d, scale, seed).unwrap();
        let out = solve_lp(&inst, eps, f64::INFINITY).unwrap();
        match &out.verdict {
            Verdict::Primal(x) => {
                prop_assert!(x.is_simplex());
                prop_assert!(inst.apply(x.as_slice()).iter().all(|&v| v <= 1.0 + eps));
            }
            Verdict::DualVector(y) => {
                prop_assert!(y.iter().all(|&v| v >= 0.0));
                prop_assert!((y.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
                prop_assert_eq!(out.iterations, out.iteration_cap);
            }
            other => prop_assert!(false, "unexpected verdict {:?}", other),
        }
        prop_assert!(out.iterations <= out.iteration_cap);
        prop_assert_eq!(potential_increases(&out.trace, 1e-9), 0);
    }

    #[test]
    fn lp_dual_vector_is_unit_and_covering(n in 1usize..6, d in 1usize..6, seed in any::<u64>(), p in finite_order()) {
        let inst = random_lp_instance(n, d, 3.0, seed).unwrap();
        let eps = 0.1;
        if let Verdict::DualVector(y) = solve_lp(&inst, eps, p).unwrap().verdict {
            prop_assert!((vector_pnorm(&y, dual_exponent(p)) - 1.0).abs() <= 1e-6);
            for i in 0..n {
                let cover: f64 = (0..d).map(|j| inst.matrix()[[j, i]] * y[j]).sum();
                prop_assert!(cover >= 1.0 - eps - 1e-12);
            }
        }
    }

    #[test]
    fn sdp_certificates_are_valid(n in 1usize..6, d in 1usize..6, rank in 1usize..4, seed in any::<u64>(), p in prop_oneof![Just(3.0), Just(5.0)], scale in 0.2f64..3.0) {
        let inst = random_sdp_instance(n, d, rank, scale, seed).unwrap();
        let out = match solve_sdp(&inst, 0.25, p, &SchattenOptions::exact()) {
            Err(Error::InfeasibleAfterPreprocessing) => {
                let bound = n as f64 / 0.25;
                prop_assert!((0..n).all(|i| inst.family().lambda_max(i) > bound));
                return Ok(());
            }
            r => r.unwrap(),
        };
        let report = check_sdp_certificate(&inst, &out.verdict, 0.25, p).unwrap();
        if out.removed.is_empty() || out.verdict.is_primal() {
            prop_assert!(report.passed, "{:?}", report.violations);
        } else {
            let kept: Vec<usize> = (0..n).filter(|i| !out.removed.contains(i)).collect();
            let reduced = check_sdp_certificate(&inst.subset(&kept), &out.verdict, 0.25, p).unwrap();
            prop_assert!(reduced.passed, "{:?}", reduced.violations);
        }
        prop_assert!(out.iterations <= out.iteration_cap);
        prop_assert_eq!(potential_increases(&out.trace, 1e-9), 0);
    }

    #[test]
    fn lp_scaling_down_never_loses_feasibility(n in 1usize..6, d in 1usize..6, seed in any::<u64>()) {
        let inst = random_lp_instance(n, d, 1.0, seed).unwrap();
        let eps = 0.1;
        let tiny = inst.scaled(1e-3);
        prop_assert!(solve_lp(&tiny, eps, 3.0).unwrap().verdict.is_primal());
    }
}

#[test]
fn sketched_sdp_certificates_are_valid() {
    for seed in 0..6 {
        let inst = random_sdp_instance(4, 5, 2, 1.5, seed).unwrap();
        let out = solve_sdp(&inst, 0.25, 3.0, &SchattenOptions::sketched(seed)).unwrap();
        let report = check_sdp_certificate(&inst, &out.verdict, 0.25, 3.0).unwrap();
        assert!(report.passed, "seed {seed}: {:?}", report.violations);
    }
}

#[test]
fn lp_identity_fixture_is_primal() {
    let inst = LpPackingInstance::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let out = solve_lp(&inst, 0.1, 3.0).unwrap();
    let x = out.verdict.primal().expect("||(1/2, 1/2)||_3 < 1");
    assert!(vector_pnorm(&inst.apply(x.as_slice()), 3.0) <= 1.1);
}

#[test]
fn boxed_decide_monotone_and_capped() {
    let inst = random_sdp_instance(6, 3, 2, 1.0, 3).unwrap();
    let cfg = BoxedConfig::new(6, 3, 1.0, 0.5, 3.0, 1.0).unwrap();
    let expected_cap = (6.0 * (18.0f64 / 0.5).ln() / (cfg.eta * 0.5)).ceil() as usize;
    assert_eq!(cfg.iteration_cap, expected_cap);
    for target in [0.2, 1.0, 5.0] {
        let out = boxed_schatten_decide(&inst, &cfg.with_target(target), true).unwrap();
        assert!(out.iterations <= out.iteration_cap);
        assert_eq!(potential_increases(&out.trace, 1e-9), 0);
    }
}

#[test]
fn boxed_optimum_respects_box_and_bracket() {
    let inst = random_sdp_instance(5, 3, 1, 1.0, 11).unwrap();
    let (alpha, eps) = (1.0, 0.5);
    let opt = boxed_schatten_optimize(&inst, alpha, eps, 3.0, &OptimizeOptions::default()).unwrap();
    assert!(opt.x.is_simplex());
    assert!(opt.x.max() <= (1.0 + alpha) * (1.0 + eps) / 5.0 + 1e-12);
    assert!(opt.certified_lower <= opt.value + 1e-12);
    assert!(opt.value <= opt.upper * (1.0 + 1e-12));
}
