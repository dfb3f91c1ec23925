use proptest::prelude::*;

use entcost::entanglement::{
    conditional_entropy_cq, ensemble_from_isometry, eof_minimize, eof_objective, eof_two_qubit,
    CqExtension, Ensemble, EofOptions, SearchOptions,
};
use entcost::qcore::random::{derive_seed, haar_unitary, random_pure, rng_from_seed};
use entcost::qcore::{partial_trace, tensor_product, BipartiteSplit, DensityMatrix, Subsystem};

/// Two-qubit state from tracing the third qubit of a random 3-qubit pure state.
fn rank_two_state(seed: u64) -> DensityMatrix {
    let mut rng = rng_from_seed(seed);
    let split = BipartiteSplit::new(4, 2).unwrap();
    let psi = random_pure(&mut rng, 8, Some(split)).unwrap();
    partial_trace(&DensityMatrix::from_pure(&psi), split, Subsystem::A)
        .unwrap()
        .with_split(BipartiteSplit::new(2, 2).unwrap())
        .unwrap()
}

fn options(restarts: usize) -> EofOptions {
    EofOptions {
        member_count: None,
        search: SearchOptions {
            restarts,
            seed: 5,
            ..SearchOptions::default()
        },
    }
}

#[test]
fn optimizer_matches_wootters_on_three_qubit_marginals() {
    let mut worst: f64 = 0.0;
    for i in 0..200u64 {
        let rho = rank_two_state(derive_seed(41, i));
        let got = eof_minimize(&rho, &options(20)).unwrap().value_nats;
        worst = worst.max((got - eof_two_qubit(&rho).unwrap()).abs());
    }
    assert!(worst <= 1e-3, "{worst}");
}

#[test]
fn eof_is_local_unitary_invariant() {
    let mut worst: f64 = 0.0;
    for i in 0..200u64 {
        let rho = rank_two_state(derive_seed(43, i));
        let mut rng = rng_from_seed(derive_seed(44, i));
        let u = tensor_product(&haar_unitary(&mut rng, 2), &haar_unitary(&mut rng, 2));
        let rotated = rho.conjugate(&u).unwrap();
        let a = eof_minimize(&rho, &options(20)).unwrap().value_nats;
        let b = eof_minimize(&rotated, &options(20)).unwrap().value_nats;
        worst = worst.max((a - b).abs());
    }
    assert!(worst <= 2e-3, "{worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn any_decomposition_bounds_the_minimum(seed in any::<u64>(), extra in 0usize..3) {
        let rho = rank_two_state(seed);
        let best = eof_minimize(&rho, &options(10)).unwrap().value_nats;
        let k = 2 + extra;
        let mut rng = rng_from_seed(seed ^ 0x5a5a);
        let e = ensemble_from_isometry(&rho, &haar_unitary(&mut rng, k), k).unwrap();
        prop_assert!(eof_objective(&e) >= best - 1e-9);
        prop_assert!(e.mixture().unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-9);
    }

    #[test]
    fn conditional_entropy_identity(seed in any::<u64>(), k in 1usize..4, da in 1usize..4, db in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let split = BipartiteSplit::new(da, db).unwrap();
        let members = (0..k).map(|_| random_pure(&mut rng, split.total(), Some(split)).unwrap()).collect();
        let probs = entcost::qcore::random::random_probabilities(&mut rng, k);
        let e = Ensemble::new(probs, members).unwrap();
        let cq = CqExtension::new(e.clone());
        prop_assert!((conditional_entropy_cq(&cq).unwrap() - eof_objective(&e)).abs() < 1e-9);
        let rab = cq.assemble_rab().unwrap();
        let split_r = BipartiteSplit::new(k, split.total()).unwrap();
        let ab = partial_trace(&rab, split_r, Subsystem::B).unwrap();
        prop_assert!(ab.matrix().max_abs_diff(e.mixture().unwrap().matrix()) < 1e-9);
    }
}
