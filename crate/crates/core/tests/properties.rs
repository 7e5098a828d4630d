mod common;

use common::{random_full_rank, random_stabilizer_group, rng, trace_distance};
use irrcorr::qstate::{hermitian_log, max_entry_deviation};
use irrcorr::{
    depolarize, extract_constraints, fit, ghz_state, hermitian_exp, partial_trace, spectrum_continuity,
    spectrum_full_rank, tensor, total_correlation, von_neumann_entropy, ContinuitySchedule,
    DensityMatrix, GhzSpec, SolverOptions, SubsetIndex,
};
use proptest::prelude::*;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn nested_partial_traces_agree(seed in any::<u64>(), n in 2usize..=4) {
        let rho = random_full_rank(&mut rng(seed), n, 0.0);
        let keep: Vec<usize> = (1..=n).filter(|j| j % 2 == 1 || *j == 2).collect();
        let outer = partial_trace(&rho, &SubsetIndex::new(keep.clone(), n).unwrap()).unwrap();
        let direct = partial_trace(&rho, &SubsetIndex::new([keep[0]], n).unwrap()).unwrap();
        let nested = partial_trace(&outer, &SubsetIndex::new([1], keep.len()).unwrap()).unwrap();
        prop_assert!(max_entry_deviation(direct.matrix(), nested.matrix()) < 1e-12);
    }

    #[test]
    fn entropy_is_additive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_full_rank(&mut r, 1, 0.0);
        let b = random_full_rank(&mut r, 2, 0.0);
        let joint = von_neumann_entropy(&tensor(&a, &b).unwrap()).unwrap();
        let sum = von_neumann_entropy(&a).unwrap() + von_neumann_entropy(&b).unwrap();
        prop_assert!((joint - sum).abs() < 1e-9);
    }

    #[test]
    fn exp_log_round_trip(seed in any::<u64>()) {
        let rho = random_full_rank(&mut rng(seed), 2, 1e-3);
        let back = hermitian_exp(&hermitian_log(rho.matrix()).unwrap()).unwrap();
        prop_assert!(max_entry_deviation(&back, rho.matrix()) < 1e-9);
    }

    #[test]
    fn rank_profile_is_consistent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let m = r.gen_range(1..=n);
        let g = random_stabilizer_group(&mut r, n, m);
        let profile = g.rank_profile().unwrap();
        prop_assert!(profile.ranks.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(profile.rank(n), m);
        let s = profile.spectrum(n);
        let sum: f64 = s.c_of_k.values().sum();
        prop_assert_eq!(sum, (m - profile.rank(1)) as f64);
        prop_assert_eq!(s.c_total, sum);
    }

    #[test]
    fn lambda_family_keeps_marginals_of_order(seed in any::<u64>(), lambda in 0.1f64..2.0) {
        let mut r = rng(seed);
        let n = 3;
        let m = r.gen_range(1..=n);
        let g = random_stabilizer_group(&mut r, n, m);
        let nested = g.nested_generators().unwrap();
        let rho = g.to_density_matrix().unwrap();
        for order in 1..n {
            let family = nested.lambda_family(order, lambda).unwrap();
            let limit = nested.lambda_family(order, 40.0).unwrap();
            for keep in SubsetIndex::all_of_size(n, order) {
                let a = partial_trace(&limit, &keep).unwrap();
                let b = partial_trace(&rho, &keep).unwrap();
                prop_assert!(trace_distance(&a, &b) < 1e-10);
            }
            prop_assert!((family.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(config(6))]

    #[test]
    fn maxent_fit_properties(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = random_full_rank(&mut r, 3, 1e-3);
        let opts = SolverOptions::default();
        let fitted = fit(&extract_constraints(&rho, 2).unwrap(), &opts).unwrap();

        // Reproduces every pair marginal.
        for keep in SubsetIndex::all_of_size(3, 2) {
            let a = partial_trace(&fitted.state, &keep).unwrap();
            let b = partial_trace(&rho, &keep).unwrap();
            prop_assert!(trace_distance(&a, &b) < 1e-8);
        }
        // Entropy ladder is monotone.
        let s = spectrum_full_rank(&rho, &opts).unwrap();
        prop_assert!(s.entropy_ladder.windows(2).all(|w| w[0] >= w[1] - 1e-9));
        // Refitting the reconstruction is idempotent.
        let again = fit(&extract_constraints(&fitted.state, 2).unwrap(), &opts).unwrap();
        prop_assert!(trace_distance(&again.state, &fitted.state) < 1e-8);
        // Its entropy bounds that of the midpoint with the original.
        let mid = DensityMatrix::new((rho.matrix() + fitted.state.matrix()).scale(0.5)).unwrap();
        let lower = 0.5 * (von_neumann_entropy(&rho).unwrap() + fitted.entropy_bits);
        let s_mid = von_neumann_entropy(&mid).unwrap();
        prop_assert!(s_mid >= lower - 1e-12);
        prop_assert!(fitted.entropy_bits >= s_mid - 1e-9);
    }
}

#[test]
fn ghz_total_correlation() {
    for (n, a) in [(2, 0.5), (3, 0.2), (4, 0.7), (5, 0.35)] {
        let spec = GhzSpec::new(n, a, 0.9).unwrap();
        let rho = ghz_state(&spec).to_density_matrix();
        let e = common::binary_entropy_oracle(a);
        assert!((total_correlation(&rho).unwrap() - n as f64 * e).abs() < 1e-9);
    }
}

#[test]
fn stabilizer_spectra_match_continuity() {
    let mut r = rng(3);
    for _ in 0..8 {
        let n = r.gen_range(2..=4);
        let m = r.gen_range(1..=n);
        let g = random_stabilizer_group(&mut r, n, m);
        let exact = g.theorem2_spectrum().unwrap();
        let rho = g.to_density_matrix().unwrap();
        let numeric = spectrum_continuity(&rho, &ContinuitySchedule::default(), &SolverOptions::default()).unwrap();
        let dev = exact.max_deviation(&numeric);
        assert!(dev < 5e-2, "{:?}: {exact:?} vs {numeric:?}", g.generators());
    }
}

#[test]
fn depolarized_states_stay_full_rank() {
    let rho = DensityMatrix::basis_state(3, 5);
    let d = depolarize(&rho, 1e-4).unwrap();
    assert!(d.min_eigenvalue() >= 1e-4 / 8.0 - 1e-15);
    assert!(spectrum_full_rank(&d, &SolverOptions::default()).is_ok());
}
