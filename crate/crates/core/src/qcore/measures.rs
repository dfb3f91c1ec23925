use super::linalg::{hermitian_eig, rank_cutoff, singular_values, sqrt_psd};
use super::matrix::ComplexMatrix;
use super::state::DensityMatrix;
use crate::error::{Error, Result};

/// Shannon entropy in nats of a (possibly slightly noisy) probability vector;
/// non-positive entries contribute zero.
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum::<f64>()
        .max(0.0)
}

/// `S(ρ) = -Tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

/// Uhlmann fidelity `Tr sqrt(sqrt(ρ) σ sqrt(ρ))` for normalized states.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(fidelity_operators(rho.matrix(), sigma.matrix())?.min(1.0))
}

/// Fidelity of two PSD operators, either of which may be subnormalized.
///
/// Evaluated as the trace norm `||sqrt(A) sqrt(B)||_1`, i.e. the sum of
/// singular values, which is well conditioned even when the spectrum of
/// `sqrt(A) B sqrt(A)` has eigenvalues at rounding level.
pub fn fidelity_operators(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || !a.is_square() || !b.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity of {}x{} and {}x{} operators",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let sa = sqrt_psd(a)?;
    let sb = sqrt_psd(b)?;
    let prod = &sa * &sb;
    Ok(singular_values(&prod).iter().sum::<f64>().max(0.0))
}

/// `S(ρ‖ω) = Tr ρ (ln ρ − ln ω)` in nats; `+∞` when the support of ρ is not
/// contained in the support of ω.
pub fn relative_entropy(rho: &DensityMatrix, omega: &DensityMatrix) -> Result<f64> {
    if rho.dim() != omega.dim() {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy of dimensions {} and {}",
            rho.dim(),
            omega.dim()
        )));
    }
    let eig = hermitian_eig(omega.matrix())?;
    let cutoff = rank_cutoff(&eig.values);
    let mut cross = 0.0;
    let mut outside = 0.0;
    for (k, &mu) in eig.values.iter().enumerate() {
        let v = eig.vector(k);
        let w = rho.matrix().mul_vec(&v);
        let weight = super::matrix::inner_product(&v, &w).re;
        if mu > cutoff {
            cross += weight * mu.ln();
        } else {
            outside += weight;
        }
    }
    if outside > 1e-12 {
        return Ok(f64::INFINITY);
    }
    let value = -von_neumann_entropy(rho) - cross;
    Ok(value.max(0.0))
}

/// `||A||_1 / 2` for Hermitian `A`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch("trace distance".into()));
    }
    let diff = rho.matrix() - sigma.matrix();
    let vals = super::linalg::hermitian_eigenvalues(&diff)?;
    Ok(0.5 * vals.iter().map(|l| l.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::{C64, ZERO};
    use crate::qcore::state::PureState;

    #[test]
    fn entropy_cases() {
        let pure = DensityMatrix::from_pure(&PureState::basis(3, 0, None).unwrap());
        assert!(von_neumann_entropy(&pure).abs() < 1e-14);
        let mixed = DensityMatrix::maximally_mixed(5);
        assert!((von_neumann_entropy(&mixed) - 5f64.ln()).abs() < 1e-12);
        let rho = DensityMatrix::from_diagonal(&[0.9, 0.1]).unwrap();
        // -0.9 ln 0.9 - 0.1 ln 0.1
        assert!((von_neumann_entropy(&rho) - 0.325_082_973_391_448_2).abs() < 1e-12);
    }

    #[test]
    fn fidelity_cases() {
        let rho = DensityMatrix::from_diagonal(&[0.3, 0.7]).unwrap();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-12);

        let zero = DensityMatrix::from_pure(&PureState::basis(2, 0, None).unwrap());
        let one = DensityMatrix::from_pure(&PureState::basis(2, 1, None).unwrap());
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-14);

        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((fidelity(&zero, &mixed).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn fidelity_of_pure_states_is_overlap() {
        let s = 0.5f64.sqrt();
        let plus = PureState::new(vec![C64::new(s, 0.0), C64::new(s, 0.0)], None).unwrap();
        let zero = PureState::basis(2, 0, None).unwrap();
        let f = fidelity(
            &DensityMatrix::from_pure(&plus),
            &DensityMatrix::from_pure(&zero),
        )
        .unwrap();
        assert!((f - s).abs() < 1e-12);
        let _ = ZERO;
    }

    #[test]
    fn relative_entropy_cases() {
        let rho = DensityMatrix::from_diagonal(&[0.6, 0.4]).unwrap();
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-12);

        let zero = DensityMatrix::from_pure(&PureState::basis(2, 0, None).unwrap());
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((relative_entropy(&zero, &mixed).unwrap() - 2f64.ln()).abs() < 1e-12);

        assert_eq!(relative_entropy(&mixed, &zero).unwrap(), f64::INFINITY);
        assert!(relative_entropy(&mixed, &DensityMatrix::maximally_mixed(3)).is_err());
    }
}
