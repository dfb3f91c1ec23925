use nalgebra::DMatrix;

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Hermiticity tolerance for inputs to the spectral routines.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Relative eigenvalue tolerance for rank and support decisions.
pub const RANK_TOL: f64 = 1e-12;

/// Spectral decomposition of a Hermitian matrix, eigenvalues non-increasing.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `Σ f(λ_i) v_i v_i†`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = self.vectors.inner();
        let d = v.nrows();
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let m = DMatrix::from_fn(d, d, |i, j| {
            let mut acc = ZERO;
            for (k, &w) in weights.iter().enumerate() {
                if w != 0.0 {
                    acc += v[(i, k)] * v[(j, k)].conj() * w;
                }
            }
            acc
        });
        ComplexMatrix::from(m)
    }

    /// Number of eigenvalues above `RANK_TOL` times the largest magnitude.
    pub fn rank(&self) -> usize {
        let cutoff = rank_cutoff(&self.values);
        self.values.iter().filter(|&&l| l > cutoff).count()
    }
}

pub(crate) fn rank_cutoff(values: &[f64]) -> f64 {
    let scale = values.iter().map(|l| l.abs()).fold(0.0, f64::max);
    RANK_TOL * scale
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let err = a.hermiticity_error();
    if err > HERMITIAN_TOL {
        return Err(Error::NotHermitian(err));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized before decomposition, so results are exactly
/// Hermitian-consistent. Ties keep the solver's order (stable sort).
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<Eigen> {
    check_hermitian(a)?;
    let eig = a.hermitian_part().into_inner().symmetric_eigen();
    let d = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Eigen {
        values,
        vectors: vectors.into(),
    })
}

/// Eigenvalues only, non-increasing.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    Ok(eigenvalues_unchecked(a.inner()))
}

/// Eigenvalues of a matrix the caller guarantees to be Hermitian.
pub(crate) fn eigenvalues_unchecked(a: &DMatrix<C64>) -> Vec<f64> {
    let n = a.nrows();
    let mut vals = match n {
        1 => vec![a[(0, 0)].re],
        2 => {
            let p = a[(0, 0)].re;
            let q = a[(1, 1)].re;
            let off = a[(0, 1)].norm_sqr();
            let mean = 0.5 * (p + q);
            let r = (0.25 * (p - q) * (p - q) + off).sqrt();
            vec![mean + r, mean - r]
        }
        _ => {
            let h = (a + a.adjoint()) * C64::new(0.5, 0.0);
            h.symmetric_eigenvalues().iter().copied().collect()
        }
    };
    vals.sort_by(|x, y| y.total_cmp(x));
    vals
}

/// Principal square root of a PSD matrix; eigenvalues at or below the rank
/// cutoff are set to zero.
pub fn sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    let cutoff = rank_cutoff(&eig.values);
    Ok(eig.apply(|l| if l > cutoff { l.sqrt() } else { 0.0 }))
}

/// Singular values, non-increasing.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = a.inner().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Extends orthonormal columns to a full orthonormal basis of `dim`-space by
/// Gram-Schmidt against the canonical vectors, taken in index order.
pub fn complete_basis(columns: &[Vec<C64>], dim: usize) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = columns.to_vec();
    let mut k = 0;
    while basis.len() < dim && k < dim {
        let mut v = vec![ZERO; dim];
        v[k] = C64::new(1.0, 0.0);
        // Two passes of modified Gram-Schmidt for stability.
        for _ in 0..2 {
            for b in &basis {
                let overlap: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= overlap * bi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
        k += 1;
    }
    basis
}
