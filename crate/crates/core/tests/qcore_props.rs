use nalgebra::DMatrix;
use proptest::prelude::*;

use entcost::qcore::random::{
    derive_seed, random_hermitian, random_mixed, random_pure, rng_from_seed,
};
use entcost::qcore::{
    fidelity, hermitian_eig, partial_trace, partial_trace_operator, schmidt_decompose,
    trace_distance, von_neumann_entropy, BipartiteSplit, ComplexMatrix, DensityMatrix, Subsystem,
    C64,
};

#[test]
fn eigendecomposition_reconstructs() {
    let mut worst: f64 = 0.0;
    for i in 0..1000u64 {
        let mut rng = rng_from_seed(derive_seed(99, i));
        let d = 1 + (i as usize % 16);
        let a = random_hermitian(&mut rng, d);
        let eig = hermitian_eig(&a).unwrap();
        let back = &(&eig.vectors * &ComplexMatrix::from_diagonal(&eig.values)) * &eig.vectors.adjoint();
        worst = worst.max(back.max_abs_diff(&a));
    }
    assert!(worst <= 1e-8, "{worst}");
}

fn reduced_eigenvalues(v: &[C64], split: BipartiteSplit) -> Vec<f64> {
    let red = DMatrix::from_fn(split.dim_a, split.dim_a, |i, j| {
        (0..split.dim_b)
            .map(|b| v[i * split.dim_b + b] * v[j * split.dim_b + b].conj())
            .sum::<C64>()
    });
    let mut ev: Vec<f64> = red.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_preserves_trace_and_positivity(seed in any::<u64>(), da in 1usize..5, db in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let split = BipartiteSplit::new(da, db).unwrap();
        let rho = random_mixed(&mut rng, split.total(), 3).unwrap();
        for keep in [Subsystem::A, Subsystem::B] {
            let red = partial_trace_operator(rho.matrix(), split, keep).unwrap();
            prop_assert!((red.trace().re - 1.0).abs() < 1e-12);
            let ev = hermitian_eig(&red).unwrap().values;
            prop_assert!(ev.iter().all(|&l| l > -1e-12));
            prop_assert!(partial_trace(&rho.clone().with_split(split).unwrap(), split, keep).is_ok());
        }
    }

    #[test]
    fn schmidt_matches_reduced_spectrum(seed in any::<u64>(), da in 1usize..5, db in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let split = BipartiteSplit::new(da, db).unwrap();
        let psi = random_pure(&mut rng, split.total(), Some(split)).unwrap();
        let s = schmidt_decompose(&psi, split).unwrap();
        let ev = reduced_eigenvalues(psi.amplitudes(), split);
        for (k, c) in s.coefficients.iter().enumerate() {
            prop_assert!((c - ev[k]).abs() < 1e-9);
        }
        prop_assert!(s.coefficients.windows(2).all(|w| w[0] >= w[1]));
        let back = s.reconstruct();
        let err = back.iter().zip(psi.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10);
    }

    #[test]
    fn fidelity_respects_trace_distance(seed in any::<u64>(), d in 1usize..7) {
        let mut rng = rng_from_seed(seed);
        let rho = random_mixed(&mut rng, d, 2).unwrap();
        let sigma = random_mixed(&mut rng, d, d).unwrap();
        let f = fidelity(&rho, &sigma).unwrap();
        let t = trace_distance(&rho, &sigma).unwrap();
        prop_assert!(f >= 1.0 - t - 1e-9);
        prop_assert!(f <= 1.0 + 1e-12);
        prop_assert!((f - fidelity(&sigma, &rho).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn entropy_is_additive(seed in any::<u64>(), d1 in 1usize..5, d2 in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let a = random_mixed(&mut rng, d1, d1).unwrap();
        let b = random_mixed(&mut rng, d2, d2).unwrap();
        let ab = DensityMatrix::new(entcost::qcore::tensor_product(a.matrix(), b.matrix()), None).unwrap();
        let lhs = von_neumann_entropy(&ab);
        let rhs = von_neumann_entropy(&a) + von_neumann_entropy(&b);
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }
}
