use proptest::prelude::*;

use entcost::cli::fixtures::schmidt_fixture;
use entcost::dilution::{
    achievability_curve_iid, converse_bound_level, dilution_fidelity_formula, dilution_output,
    effective_rate, rate_to_rank, simulate_dilution, ScissorsVariant,
};
use entcost::entanglement::{CqExtension, Ensemble};
use entcost::qcore::random::{random_probabilities, random_pure, rng_from_seed};
use entcost::qcore::{entropy_of_spectrum, BipartiteSplit};
use entcost::spectra::{default_gamma_grid, CqLevel};

const VARIANTS: [ScissorsVariant; 2] = [ScissorsVariant::OrthogonalFlag, ScissorsVariant::WeylTeleport];

fn random_ensemble(seed: u64, da: usize, db: usize, k: usize) -> Ensemble {
    let mut rng = rng_from_seed(seed);
    let split = BipartiteSplit::new(da, db).unwrap();
    let members = (0..k)
        .map(|_| random_pure(&mut rng, split.total(), Some(split)).unwrap())
        .collect();
    Ensemble::new(random_probabilities(&mut rng, k), members).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn simulation_is_a_state_within_bounds(seed in any::<u64>(), da in 1usize..5, db in 1usize..5, k in 1usize..4) {
        let e = random_ensemble(seed, da, db, k);
        let mut last_formula = 0.0;
        for m in 1..=e.split().min_local() {
            let formula = dilution_fidelity_formula(&e, m).unwrap();
            prop_assert!(formula >= last_formula - 1e-15);
            last_formula = formula;
            for v in VARIANTS {
                let out = dilution_output(&e, m, v).unwrap();
                prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-9);
                let r = simulate_dilution(&e, m, v).unwrap();
                let f2 = r.fidelity_sim * r.fidelity_sim;
                prop_assert!(f2 >= r.lower_bound - 1e-9, "{:?}", r);
                prop_assert!((0.0..=1.0).contains(&r.fidelity_sim));
                if m == e.split().min_local() {
                    prop_assert!((r.fidelity_sim - 1.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn flag_variant_respects_upper_bound(seed in any::<u64>(), da in 1usize..5, db in 1usize..5, k in 1usize..4) {
        let e = random_ensemble(seed, da, db, k);
        for m in 1..=e.split().min_local() {
            let r = simulate_dilution(&e, m, ScissorsVariant::OrthogonalFlag).unwrap();
            prop_assert!(r.fidelity_sim.powi(2) <= r.upper_bound + 1e-9, "{:?}", r);
        }
    }
}

/// Weyl-teleport draws are reported separately: their upper bound holds on
/// most but not all draws.
#[test]
fn weyl_variant_upper_bound() {
    let mut violations = Vec::new();
    for seed in 0..400u64 {
        let e = random_ensemble(seed, 1 + (seed as usize % 4), 1 + (seed as usize / 4 % 4), 1 + (seed as usize % 3));
        for m in 1..=e.split().min_local() {
            let r = simulate_dilution(&e, m, ScissorsVariant::WeylTeleport).unwrap();
            let f2 = r.fidelity_sim.powi(2);
            if f2 > r.upper_bound + 1e-9 {
                violations.push((seed, m, f2 - r.upper_bound));
            }
        }
    }
    assert!(violations.is_empty(), "upper bound exceeded on {} runs: {violations:?}", violations.len());
}

fn base_entropy(lambda: &[f64]) -> f64 {
    entropy_of_spectrum(lambda)
}

#[test]
fn achievability_monotone_in_n() {
    let ns: Vec<usize> = (1..=24).collect();
    let mut broken = Vec::new();
    for lambda in [vec![0.9, 0.1], vec![0.7, 0.3], vec![0.6, 0.3, 0.1]] {
        let base = Ensemble::single(schmidt_fixture(&lambda).unwrap()).unwrap();
        let s = base_entropy(&lambda);
        for (delta, up) in [(0.1, true), (-0.1, false)] {
            let rows = achievability_curve_iid(&base, &[s + delta], &ns).unwrap();
            for w in rows.windows(2) {
                let ok = if up {
                    w[1].f2_formula >= w[0].f2_formula
                } else {
                    w[1].f2_formula <= w[0].f2_formula
                };
                if !ok {
                    broken.push(format!(
                        "lambda={lambda:?} R=S{delta:+}: n={} {:.5} -> n={} {:.5}",
                        w[0].n, w[0].f2_formula, w[1].n, w[1].f2_formula
                    ));
                }
            }
        }
    }
    assert!(broken.is_empty(), "{} non-monotone steps:\n{}", broken.len(), broken.join("\n"));
}

#[test]
fn converse_dominates_exact_fidelity() {
    let grid = default_gamma_grid();
    for lambda in [vec![0.9, 0.1], vec![0.6, 0.3, 0.1]] {
        let base = Ensemble::single(schmidt_fixture(&lambda).unwrap()).unwrap();
        let cq = CqExtension::new(base.clone());
        let s = base_entropy(&lambda);
        for n in [1usize, 5, 12, 24] {
            let level = CqLevel::iid(&cq, n).unwrap();
            for rate in [s - 0.2, s, s + 0.15] {
                let r_eff = effective_rate(n, rate_to_rank(n, rate));
                let f2 = achievability_curve_iid(&base, &[r_eff], &[n]).unwrap()[0].f2_formula;
                for &g in &grid {
                    let bound = converse_bound_level(&level, g, r_eff);
                    assert!(bound >= f2 - 1e-9, "n={n} R={rate} g={g}: {bound} < {f2}");
                }
            }
        }
    }
}
