//! Generators for the bundled state fixtures.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::io::StateFile;
use crate::qcore::matrix::{ComplexMatrix, C64, ZERO};
use crate::qcore::random::{random_mixed, random_pure, rng_from_seed};
use crate::qcore::state::{maximally_entangled, BipartiteSplit, DensityMatrix, PureState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureKind {
    /// Maximally entangled state on `d x d`.
    Bell,
    /// `p |singlet><singlet| + (1 − p) I/4`.
    Werner,
    /// Partial trace of a random pure state, rank at most `--rank`.
    RandomMixed,
    RandomPure,
    /// Tensor product of two random local pure states.
    Product,
}

#[derive(Clone, Debug)]
pub struct FixtureParams {
    pub dims: (usize, usize),
    /// Werner weight.
    pub p: f64,
    /// Rank bound for `random-mixed`; `None` means full rank.
    pub rank: Option<usize>,
    pub seed: u64,
}

impl Default for FixtureParams {
    fn default() -> Self {
        Self {
            dims: (2, 2),
            p: 0.9,
            rank: None,
            seed: 0,
        }
    }
}

pub fn singlet() -> PureState {
    let s = 0.5f64.sqrt();
    PureState::new(
        vec![ZERO, C64::new(s, 0.0), C64::new(-s, 0.0), ZERO],
        Some(BipartiteSplit::new(2, 2).expect("qubits")),
    )
    .expect("normalized")
}

pub fn werner_state(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("Werner weight {p} outside [0, 1]")));
    }
    let m = &DensityMatrix::from_pure(&singlet()).matrix().scale(p)
        + &ComplexMatrix::identity(4).scale((1.0 - p) / 4.0);
    DensityMatrix::new(m, Some(BipartiteSplit::new(2, 2)?))
}

pub fn bell_state(d: usize) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_pure(&maximally_entangled(
        d,
        BipartiteSplit::new(d, d)?,
    )?))
}

/// Pure `Σ sqrt(λ_k) |k k>`.
pub fn schmidt_fixture(lambda: &[f64]) -> Result<PureState> {
    let d = lambda.len();
    if lambda.iter().any(|&l| !(l >= 0.0)) {
        return Err(Error::InvalidParameter("Schmidt coefficients must be >= 0".into()));
    }
    let mut v = vec![ZERO; d * d];
    for (k, &l) in lambda.iter().enumerate() {
        v[k * d + k] = C64::new(l.sqrt(), 0.0);
    }
    PureState::normalized(v, Some(BipartiteSplit::new(d, d)?))
}

pub fn generate_fixture(kind: FixtureKind, params: &FixtureParams) -> Result<StateFile> {
    let (da, db) = params.dims;
    let split = BipartiteSplit::new(da, db)?;
    let mut rng = rng_from_seed(params.seed);
    match kind {
        FixtureKind::Bell => {
            if da != db {
                return Err(Error::InvalidParameter(format!(
                    "bell fixture needs equal dims, got {da}x{db}"
                )));
            }
            Ok(StateFile::Density(bell_state(da)?))
        }
        FixtureKind::Werner => {
            if (da, db) != (2, 2) {
                return Err(Error::InvalidParameter("werner fixture is two-qubit only".into()));
            }
            Ok(StateFile::Density(werner_state(params.p)?))
        }
        FixtureKind::RandomMixed => {
            let env = params.rank.unwrap_or(split.total());
            if env == 0 {
                return Err(Error::InvalidParameter("rank must be >= 1".into()));
            }
            Ok(StateFile::Density(
                random_mixed(&mut rng, split.total(), env)?.with_split(split)?,
            ))
        }
        FixtureKind::RandomPure => Ok(StateFile::Pure(random_pure(
            &mut rng,
            split.total(),
            Some(split),
        )?)),
        FixtureKind::Product => {
            let a = random_pure(&mut rng, da, None)?;
            let b = random_pure(&mut rng, db, None)?;
            Ok(StateFile::Pure(PureState::product(a.amplitudes(), b.amplitudes())?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::io::{parse_state, state_to_string};
    use crate::qcore::state::{partial_trace, Subsystem};

    #[test]
    fn bell_has_maximally_mixed_marginals() {
        let StateFile::Density(rho) =
            generate_fixture(FixtureKind::Bell, &FixtureParams::default()).unwrap()
        else {
            panic!("density expected");
        };
        let split = rho.require_split().unwrap();
        for keep in [Subsystem::A, Subsystem::B] {
            let red = partial_trace(&rho, split, keep).unwrap();
            assert!(red.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-12);
        }
    }

    #[test]
    fn werner_boundaries() {
        let rho = werner_state(1.0).unwrap();
        assert!(rho.matrix().max_abs_diff(DensityMatrix::from_pure(&singlet()).matrix()) < 1e-15);
        assert!(werner_state(1.5).is_err());
        assert!(werner_state(-0.1).is_err());
    }

    #[test]
    fn random_fixtures_are_reproducible_and_round_trip() {
        let params = FixtureParams {
            dims: (2, 2),
            seed: 3,
            ..Default::default()
        };
        for kind in [FixtureKind::RandomMixed, FixtureKind::RandomPure, FixtureKind::Product] {
            let a = state_to_string(&generate_fixture(kind, &params).unwrap()).unwrap();
            let b = state_to_string(&generate_fixture(kind, &params).unwrap()).unwrap();
            assert_eq!(a, b);
            let again = state_to_string(&parse_state(&a).unwrap()).unwrap();
            let third = state_to_string(&parse_state(&again).unwrap()).unwrap();
            assert_eq!(again, third);
        }
    }
}
