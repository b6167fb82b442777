mod common;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sepdisc::bounds::{analyze_h, verify_theorem3, verify_theorem4, VerifyOptions};
use sepdisc::cones::{
    certify_block_positivity, maximize_overlap_from, minimize_from, random_product_vector, trace_nonneg_check,
    ProductOperatorSum, SearchOptions,
};
use sepdisc::discrimination::{helstrom_two_state, solve_pg_with_history, success_probability, SolverOptions};
use sepdisc::ensembles::{example1, example2, example3, Ensemble, Measurement};
use sepdisc::{eig_hermitian, ghz_state, tensor, Dims, HermitianOperator, StateVector};

use common::*;

fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5ED_D15C), failure_persistence: None, ..Config::default() }
}

fn dims_strategy() -> impl Strategy<Value = Dims> {
    prop::sample::select(vec![vec![2], vec![3], vec![2, 2], vec![2, 3], vec![3, 2], vec![2, 2, 2], vec![3, 3]])
        .prop_map(|d| Dims::new(d).unwrap())
}

fn large_dims_strategy() -> impl Strategy<Value = Dims> {
    prop::sample::select(vec![vec![2, 2, 2, 2], vec![3, 3, 3], vec![9, 9], vec![3, 3, 3, 3], vec![4, 5, 4]])
        .prop_map(|d| Dims::new(d).unwrap())
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn trace_inner_is_symmetric(dims in dims_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hermitian(&dims, &mut rng);
        let b = random_hermitian(&dims, &mut rng);
        let (ab, ba) = (a.trace_inner(&b).unwrap(), b.trace_inner(&a).unwrap());
        prop_assert!((ab - ba).abs() <= 1e-9 * (1.0 + ab.abs()));
    }

    #[test]
    fn partial_transpose_is_trace_preserving_involution(dims in dims_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hermitian(&dims, &mut rng);
        for k in 0..dims.parties() {
            let t = a.partial_transpose(k).unwrap();
            prop_assert!((t.trace() - a.trace()).abs() <= 1e-10);
            prop_assert!(t.partial_transpose(k).unwrap().max_abs_diff(&a).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn tensor_of_psd_factors_is_psd(dims in dims_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let factors: Vec<_> = dims
            .as_slice()
            .iter()
            .map(|&d| random_psd(&Dims::new(vec![d]).unwrap(), rng.random_range(1..=d), &mut rng))
            .collect();
        prop_assert!(tensor(&factors).unwrap().is_psd(1e-9).unwrap());
    }

    #[test]
    fn product_operator_sums_expand_to_psd(dims in dims_strategy(), terms in 0usize..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms = (0..terms)
            .map(|_| {
                dims.as_slice()
                    .iter()
                    .map(|&d| random_psd(&Dims::new(vec![d]).unwrap(), 1, &mut rng).into_matrix())
                    .collect()
            })
            .collect();
        let sum = ProductOperatorSum::new(dims.clone(), terms).unwrap();
        prop_assert!(sum.expand().is_psd(1e-9).unwrap());
    }

    #[test]
    fn alternating_sweeps_are_monotone(dims in dims_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hermitian(&dims, &mut rng);
        let (_, down) = minimize_from(&a, random_product_vector(&dims, &mut rng), 100).unwrap();
        prop_assert!(down.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let psi = StateVector::normalized(dims.clone(), ginibre(dims.total(), 1, &mut rng).column(0).into_owned()).unwrap();
        let (_, up) = maximize_overlap_from(&psi, random_product_vector(&dims, &mut rng), 100).unwrap();
        prop_assert!(up.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        prop_assert!(*up.last().unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn block_positive_operators_have_nonnegative_trace(m in 2usize..=3, d in 2usize..=3, b in 0.0f64..4.0) {
        let phi = ghz_state(m, d, 0).unwrap();
        let w = HermitianOperator::identity(phi.dims().clone()).add_scaled(-b, &phi.projector()).unwrap();
        let verdict = certify_block_positivity(&w, &SearchOptions::default()).unwrap();
        prop_assert_eq!(verdict.is_violated(), b > d as f64 + 1e-9);
        if !verdict.is_violated() {
            prop_assert!(trace_nonneg_check(&w, &verdict));
        }
    }

    #[test]
    fn analyze_h_never_reports_witness_and_all_psd(seed in any::<u64>(), t in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (e, _) = example2(2, 2).unwrap();
        let noise = random_hermitian(e.dims(), &mut rng).scale(0.01);
        let h = sepdisc::ensembles::example2_dual(&e, t).unwrap().add(&noise).unwrap();
        let r = analyze_h(&e, &h, &SearchOptions::default()).unwrap();
        prop_assert!(!(r.in_h_ew && r.all_psd(1e-9)));
        prop_assert_eq!(r.in_h_sep, r.per_state.iter().all(|v| !v.is_violated()));
        for v in r.per_state.iter().filter(|v| v.is_violated()) {
            prop_assert!(v.witness.is_some());
        }
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn eig_reconstructs_up_to_81(dims in large_dims_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hermitian(&dims, &mut rng);
        let spec = eig_hermitian(&a).unwrap();
        prop_assert!(spec.values.windows(2).all(|w| w[0] <= w[1]));
        let mut rec = HermitianOperator::zero(dims.clone());
        for (k, &l) in spec.values.iter().enumerate() {
            rec = rec.add_scaled(l, &StateVector::normalized(dims.clone(), spec.vector(k)).unwrap().projector()).unwrap();
        }
        prop_assert!(rec.sub(&a).unwrap().frobenius_norm() <= 1e-8 * a.frobenius_norm().max(1.0));
    }

    #[test]
    fn ghz_vectors_are_orthonormal(m in 2usize..=4, d in 2usize..=4) {
        prop_assume!(d.pow(m as u32) <= 81);
        for j in 0..d as i64 {
            for k in 0..d as i64 {
                let ip = ghz_state(m, d, j).unwrap().inner(&ghz_state(m, d, k).unwrap()).norm();
                let want = if j == k { 1.0 } else { 0.0 };
                prop_assert!((ip - want).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn solver_iterates_are_measurements(dims in dims_strategy(), n in 2usize..=4, iters in 1usize..40, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let states = raw
            .iter()
            .map(|w| (w / total, random_state(&dims, rng.random_range(1..=dims.total()), &mut rng)))
            .collect();
        let e = Ensemble::new(states).unwrap();
        let (r, history) = solve_pg_with_history(&e, &SolverOptions { max_iters: iters, tol: 0.0 }).unwrap();
        prop_assert!(history.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        prop_assert!(r.p_value <= 1.0);
        let recomputed = success_probability(&e, &r.measurement).unwrap();
        prop_assert!((recomputed - r.p_value).abs() <= 1e-10);
        let mut sum = HermitianOperator::zero(dims.clone());
        for m in r.measurement.elements() {
            prop_assert!(m.is_psd(1e-9).unwrap());
            sum = sum.add(m).unwrap();
        }
        prop_assert!(sum.max_abs_diff(&HermitianOperator::identity(dims)).unwrap() <= 1e-8);
    }

    #[test]
    fn solver_matches_helstrom(seed in any::<u64>(), eta in 0.05f64..0.95, qubits in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = Dims::uniform(qubits, 2).unwrap();
        let a = random_state(&dims, rng.random_range(1..=dims.total()), &mut rng);
        let b = random_state(&dims, rng.random_range(1..=dims.total()), &mut rng);
        let e = Ensemble::new(vec![(eta, a), (1.0 - eta, b)]).unwrap();
        let h = helstrom_two_state(&e).unwrap();
        let (s, _) = solve_pg_with_history(&e, &SolverOptions::default()).unwrap();
        prop_assert!((h.p_value - s.p_value).abs() <= 1e-6);
        prop_assert!(h.residual_min_eigs.iter().all(|&r| r >= -1e-10));
    }
}

#[test]
fn separable_measurements_never_beat_the_solver() {
    for (m, d) in [(2, 2), (3, 2), (2, 3)] {
        let (e, meas) = example1(m, d).unwrap();
        let p_g = solve_pg_with_history(&e, &SolverOptions::default()).unwrap().0.p_value;
        assert_at_most(success_probability(&e, &meas).unwrap(), p_g + 1e-8);
        let e3 = example3(m, d).unwrap();
        let p_g = solve_pg_with_history(&e3, &SolverOptions::default()).unwrap().0.p_value;
        for guess in 0..e3.len() {
            let trivial = Measurement::trivial(e3.dims(), e3.len(), guess).unwrap();
            assert_at_most(success_probability(&e3, &trivial).unwrap(), p_g + 1e-8);
        }
    }
}

fn assert_at_most(a: f64, b: f64) {
    assert!(a <= b, "{a} > {b}");
}

#[test]
fn theorem3_and_theorem4_are_exclusive() {
    let opts = VerifyOptions { solver: None, ..Default::default() };
    for (m, d) in [(2, 2), (3, 2), (2, 3)] {
        for (e, meas) in [example1(m, d).unwrap(), example2(m, d).unwrap()] {
            let t3 = verify_theorem3(&e, &meas, &opts).unwrap();
            let h = e.average();
            let q = success_probability(&e, &meas).unwrap();
            let t4 = (h.trace() - q).abs() <= 1e-9 && verify_theorem4(&e, &h, q, &opts).unwrap().holds;
            assert!(!(t3.holds && t4), "({m},{d}): both criteria hold");
        }
    }
}
