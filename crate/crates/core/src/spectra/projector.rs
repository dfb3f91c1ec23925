use crate::error::{Error, Result};
use crate::qcore::linalg::{hermitian_eig, hermitian_eigenvalues, HERMITIAN_TOL};
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::state::DensityMatrix;

/// Relative tolerance below zero at which an eigenvalue still counts as
/// non-negative in `{A >= 0}`.
pub const NONNEG_TOL: f64 = 1e-12;

/// Orthogonal projector obtained from a spectral comparison.
#[derive(Clone, Debug)]
pub struct SpectralProjector {
    matrix: ComplexMatrix,
    rank: usize,
}

impl SpectralProjector {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn source_dimension(&self) -> usize {
        self.matrix.rows()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Wraps a matrix already known to be an orthogonal projector of `rank`.
    pub(crate) fn from_parts(matrix: ComplexMatrix, rank: usize) -> Self {
        Self { matrix, rank }
    }
}

fn nonneg_cutoff(values: &[f64]) -> f64 {
    let norm = values.iter().map(|l| l.abs()).fold(0.0, f64::max);
    -NONNEG_TOL * norm
}

/// `{A >= 0}`: projector onto the eigenvectors of `A` with non-negative
/// eigenvalue, zero eigenvalues included.
pub fn positive_part_projector(a: &ComplexMatrix) -> Result<SpectralProjector> {
    let eig = hermitian_eig(a)?;
    let cutoff = nonneg_cutoff(&eig.values);
    let rank = eig.values.iter().filter(|&&l| l >= cutoff).count();
    let matrix = eig.apply(|l| if l >= cutoff { 1.0 } else { 0.0 });
    Ok(SpectralProjector { matrix, rank })
}

fn check_same_shape(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} against {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// `{A >= B} = {A - B >= 0}`.
pub fn spectral_compare(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<SpectralProjector> {
    check_same_shape(a, b)?;
    positive_part_projector(&(a - b))
}

/// `Tr[{A >= 0} A]`: the sum of the non-negative eigenvalues.
pub fn positive_part_trace(a: &ComplexMatrix) -> Result<f64> {
    let values = hermitian_eigenvalues(a)?;
    let cutoff = nonneg_cutoff(&values);
    Ok(values.iter().filter(|&&l| l >= cutoff).sum::<f64>().max(0.0))
}

/// `Tr[{A >= B}(A - B)] - Tr[P(A - B)]`, which is non-negative for every
/// `0 <= P <= I`.
pub fn lemma1_gap(a: &ComplexMatrix, b: &ComplexMatrix, p: &ComplexMatrix) -> Result<f64> {
    check_same_shape(a, b)?;
    check_same_shape(a, p)?;
    if p.hermiticity_error() > HERMITIAN_TOL {
        return Err(Error::NotHermitian(p.hermiticity_error()));
    }
    let pv = hermitian_eigenvalues(p)?;
    let (hi, lo) = (pv[0], pv[pv.len() - 1]);
    if lo < -1e-10 {
        return Err(Error::NotContraction(lo));
    }
    if hi > 1.0 + 1e-10 {
        return Err(Error::NotContraction(hi));
    }
    let diff = a - b;
    let best = positive_part_trace(&diff)?;
    Ok(best - p.trace_product(&diff).re)
}

/// `(Tr[{ρ >= e^{nγ} ω} ω], e^{-nγ})`; the first never exceeds the second.
pub fn lemma2_check(
    rho: &DensityMatrix,
    omega: &ComplexMatrix,
    n: usize,
    gamma: f64,
) -> Result<(f64, f64)> {
    check_same_shape(rho.matrix(), omega)?;
    let scale = (n as f64 * gamma).exp();
    let proj = spectral_compare(rho.matrix(), &omega.scale(scale))?;
    let value = proj.matrix().trace_product(omega).re;
    Ok((value, (-(n as f64) * gamma).exp()))
}

/// `Tr[{Π >= 0} Π]` for `Π = ρ - e^{nγ} ω`.
pub fn pi_trace(rho: &DensityMatrix, omega: &ComplexMatrix, n: usize, gamma: f64) -> Result<f64> {
    pi_trace_operators(rho.matrix(), omega, n, gamma)
}

pub(crate) fn pi_trace_operators(
    rho: &ComplexMatrix,
    omega: &ComplexMatrix,
    n: usize,
    gamma: f64,
) -> Result<f64> {
    check_same_shape(rho, omega)?;
    let scale = (n as f64 * gamma).exp();
    if !scale.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "e^(n*gamma) overflows for n={n}, gamma={gamma}"
        )));
    }
    positive_part_trace(&(rho - &omega.scale(scale)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::state::PureState;

    #[test]
    fn sign_split_and_zero_convention() {
        let p = positive_part_projector(&ComplexMatrix::from_diagonal(&[1.0, -1.0])).unwrap();
        assert!(p.matrix().max_abs_diff(&ComplexMatrix::from_diagonal(&[1.0, 0.0])) < 1e-14);
        let z = positive_part_projector(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(z.rank(), 3);
        assert!(z.matrix().max_abs_diff(&ComplexMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn compare_cases() {
        let a = ComplexMatrix::from_diagonal(&[0.3, 0.7]);
        let same = spectral_compare(&a, &a).unwrap();
        assert!(same.matrix().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
        let p = spectral_compare(
            &ComplexMatrix::from_diagonal(&[1.0, 0.0]),
            &ComplexMatrix::from_diagonal(&[0.5, 0.5]),
        )
        .unwrap();
        assert!(p.matrix().max_abs_diff(&ComplexMatrix::from_diagonal(&[1.0, 0.0])) < 1e-14);
        assert!(spectral_compare(&a, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn lemma1_edge_cases() {
        let a = ComplexMatrix::from_diagonal(&[0.9, 0.2]);
        let b = ComplexMatrix::from_diagonal(&[0.1, 0.5]);
        let opt = spectral_compare(&a, &b).unwrap();
        assert!(lemma1_gap(&a, &b, opt.matrix()).unwrap().abs() < 1e-14);
        let b = ComplexMatrix::from_diagonal(&[0.1, 0.1]);
        let gap = lemma1_gap(&a, &b, &ComplexMatrix::zeros(2, 2)).unwrap();
        assert!((gap - 0.9).abs() < 1e-14);
        let bad = ComplexMatrix::from_diagonal(&[1.5, 0.0]);
        assert!(matches!(lemma1_gap(&a, &b, &bad), Err(Error::NotContraction(_))));
    }

    #[test]
    fn lemma2_and_pi_trace_cases() {
        let zero = DensityMatrix::from_pure(&PureState::basis(2, 0, None).unwrap());
        let half = ComplexMatrix::identity(2).scale(0.5);
        let (value, bound) = lemma2_check(&zero, &half, 1, 0.0).unwrap();
        assert!((value - 0.5).abs() < 1e-14 && (bound - 1.0).abs() < 1e-14);
        let (value, _) = lemma2_check(&zero, &half, 1, 5.0).unwrap();
        assert!(value.abs() < 1e-14);

        assert!((pi_trace(&zero, &half, 1, 0.0).unwrap() - 0.5).abs() < 1e-14);
        assert!((pi_trace(&zero, &half, 1, -50.0).unwrap() - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!(pi_trace(&mixed, mixed.matrix(), 1, 0.0).unwrap().abs() < 1e-14);
    }
}
