use proptest::prelude::*;

use entcost::entanglement::{CqExtension, Ensemble};
use entcost::qcore::random::{random_mixed, random_probabilities, random_pure, rng_from_seed};
use entcost::qcore::{hermitian_eigenvalues, tensor_product, BipartiteSplit, ComplexMatrix, DensityMatrix};
use entcost::spectra::{
    cq_conditional_pi_trace, default_gamma_grid, gamma_sweep, iid_spectrum, pi_trace, SweepMode,
    SweepSource,
};

fn kron_power(m: &ComplexMatrix, n: usize) -> ComplexMatrix {
    (1..n).fold(m.clone(), |acc, _| tensor_product(&acc, m))
}

#[test]
fn iid_spectrum_matches_kronecker_power() {
    for (p, n) in [(0.7, 1), (0.7, 3), (0.9, 5), (0.5, 6), (0.62, 6)] {
        let spec = iid_spectrum(&[p, 1.0 - p], n).unwrap();
        let mut expanded: Vec<f64> = spec
            .distinct_values
            .iter()
            .zip(&spec.multiplicities)
            .flat_map(|(&v, &m)| std::iter::repeat_n(v, m as usize))
            .collect();
        let rho = ComplexMatrix::from_diagonal(&[p, 1.0 - p]);
        let mut brute = hermitian_eigenvalues(&kron_power(&rho, n)).unwrap();
        brute.sort_by(|a, b| b.total_cmp(a));
        expanded.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(brute.len(), expanded.len());
        for (a, b) in brute.iter().zip(&expanded) {
            assert!((a - b).abs() < 1e-12, "p={p} n={n}: {a} vs {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sweep_is_monotone_and_bounded(seed in any::<u64>(), d in 1usize..4, commuting in any::<bool>()) {
        let mut rng = rng_from_seed(seed);
        let (rho, omega) = if commuting {
            let a = random_probabilities(&mut rng, d);
            let b = random_probabilities(&mut rng, d);
            (DensityMatrix::from_diagonal(&a).unwrap(), ComplexMatrix::from_diagonal(&b))
        } else {
            (random_mixed(&mut rng, d, d).unwrap(), random_mixed(&mut rng, d, d).unwrap().matrix().clone())
        };
        let source = SweepSource::Iid { rho, omega };
        let grid: Vec<f64> = default_gamma_grid().into_iter().step_by(10).collect();
        let sweep = gamma_sweep(&source, &[1, 3], &grid, SweepMode::Divergence).unwrap();
        for row in &sweep.f_values {
            prop_assert!(row.iter().all(|&f| (-1e-12..=1.0 + 1e-12).contains(&f)));
            prop_assert!(row.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        }
    }

    #[test]
    fn cq_blockwise_matches_assembled(seed in any::<u64>(), k in 1usize..4, da in 1usize..4, db in 1usize..3, gamma in -1.5f64..1.5) {
        let mut rng = rng_from_seed(seed);
        let split = BipartiteSplit::new(da, db).unwrap();
        let members = (0..k).map(|_| random_pure(&mut rng, split.total(), Some(split)).unwrap()).collect();
        let cq = CqExtension::new(Ensemble::new(random_probabilities(&mut rng, k), members).unwrap());
        let ra = cq.assemble_ra().unwrap();
        let omega = cq.flag_marginal_times_identity();
        for n in [1usize, 2] {
            let blockwise = cq_conditional_pi_trace(&cq, gamma, n);
            let assembled = pi_trace(&ra, &omega, n, gamma).unwrap();
            prop_assert!((blockwise - assembled).abs() < 1e-9, "{} vs {}", blockwise, assembled);
        }
    }
}
