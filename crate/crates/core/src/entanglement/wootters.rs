//! Closed-form two-qubit entanglement of formation.

use crate::error::{Error, Result};
use crate::qcore::linalg::{singular_values, sqrt_psd};
use crate::qcore::matrix::{ComplexMatrix, C64};
use crate::qcore::measures::entropy_of_spectrum;
use crate::qcore::state::DensityMatrix;

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    let ok = rho.dim() == 4
        && rho
            .split()
            .is_none_or(|s| s.dim_a == 2 && s.dim_b == 2);
    if !ok {
        return Err(Error::DimensionMismatch(format!(
            "expected a two-qubit state, got dimension {} with split {:?}",
            rho.dim(),
            rho.split()
        )));
    }
    Ok(())
}

/// `σ_y ⊗ σ_y`.
fn spin_flip() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(0, 3, C64::new(-1.0, 0.0));
    m.set(1, 2, C64::new(1.0, 0.0));
    m.set(2, 1, C64::new(1.0, 0.0));
    m.set(3, 0, C64::new(-1.0, 0.0));
    m
}

/// Wootters concurrence `max(0, μ1 − μ2 − μ3 − μ4)`, with `μ` the singular
/// values of `sqrt(ρ) sqrt(ρ̃)` and `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
pub fn concurrence_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let yy = spin_flip();
    let conj = ComplexMatrix::from(rho.matrix().inner().map(|z| z.conj()));
    let tilde = &(&yy * &conj) * &yy;
    let mu = singular_values(&(&sqrt_psd(rho.matrix())? * &sqrt_psd(&tilde.hermitian_part())?));
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).clamp(0.0, 1.0))
}

/// `h((1 + sqrt(1 − C²)) / 2)` in nats.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let x = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
    entropy_of_spectrum(&[x, 1.0 - x])
}

pub fn eof_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    Ok(eof_from_concurrence(concurrence_two_qubit(rho)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::state::{maximally_entangled, BipartiteSplit, PureState};

    pub(crate) fn werner(p: f64) -> DensityMatrix {
        let s = 0.5f64.sqrt();
        let singlet = PureState::new(
            vec![
                C64::new(0.0, 0.0),
                C64::new(s, 0.0),
                C64::new(-s, 0.0),
                C64::new(0.0, 0.0),
            ],
            None,
        )
        .unwrap();
        let m = &DensityMatrix::from_pure(&singlet).matrix().scale(p)
            + &ComplexMatrix::identity(4).scale((1.0 - p) / 4.0);
        DensityMatrix::new(m, Some(BipartiteSplit::new(2, 2).unwrap())).unwrap()
    }

    #[test]
    fn bell_and_product() {
        let split = BipartiteSplit::new(2, 2).unwrap();
        let bell = DensityMatrix::from_pure(&maximally_entangled(2, split).unwrap());
        assert!((concurrence_two_qubit(&bell).unwrap() - 1.0).abs() < 1e-10);
        assert!((eof_two_qubit(&bell).unwrap() - 2f64.ln()).abs() < 1e-10);
        let prod = DensityMatrix::from_pure(&PureState::basis(4, 2, Some(split)).unwrap());
        assert!(concurrence_two_qubit(&prod).unwrap().abs() < 1e-10);
        assert!(eof_two_qubit(&prod).unwrap().abs() < 1e-10);
    }

    #[test]
    fn werner_closed_form() {
        let c = concurrence_two_qubit(&werner(0.9)).unwrap();
        assert!((c - 0.85).abs() < 1e-10);
        assert!(concurrence_two_qubit(&werner(0.2)).unwrap().abs() < 1e-10);
    }

    #[test]
    fn rejects_qutrits() {
        assert!(concurrence_two_qubit(&DensityMatrix::maximally_mixed(9)).is_err());
    }
}
