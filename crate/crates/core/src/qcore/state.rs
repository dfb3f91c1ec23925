use nalgebra::DMatrix;

use super::linalg::{eigenvalues_unchecked, hermitian_eig, singular_values, HERMITIAN_TOL};
use super::matrix::{vec_norm, ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Tolerance on the trace of a density matrix and on the norm of a pure state.
pub const NORM_TOL: f64 = 1e-10;

/// Lowest eigenvalue tolerated in a density matrix.
pub const PSD_TOL: f64 = 1e-10;

/// Factorization `H = H_A ⊗ H_B`; composite index `(a, b)` maps to `a * dim_b + b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteSplit {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl BipartiteSplit {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::DimensionMismatch(format!(
                "split {dim_a}x{dim_b} must have positive factors"
            )));
        }
        Ok(Self { dim_a, dim_b })
    }

    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn min_local(&self) -> usize {
        self.dim_a.min(self.dim_b)
    }

    /// Split of the n-fold tensor power with all A factors grouped first.
    pub fn power(&self, n: usize) -> Self {
        Self {
            dim_a: self.dim_a.pow(n as u32),
            dim_b: self.dim_b.pow(n as u32),
        }
    }

    fn check(&self, dim: usize) -> Result<()> {
        if self.total() != dim {
            return Err(Error::DimensionMismatch(format!(
                "split {}x{} does not factor dimension {dim}",
                self.dim_a, self.dim_b
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    split: Option<BipartiteSplit>,
}

impl DensityMatrix {
    /// Validates the state invariants; the stored matrix is the Hermitian part
    /// of the input.
    pub fn new(matrix: ComplexMatrix, split: Option<BipartiteSplit>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if let Some(s) = split {
            s.check(matrix.rows())?;
        }
        let herr = matrix.hermiticity_error();
        if herr > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herr));
        }
        let matrix = matrix.hermitian_part();
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = eigenvalues_unchecked(matrix.inner())
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix, split })
    }

    /// Hermitizes and rescales to unit trace before validating. Used for
    /// states assembled by arithmetic that drifts at the 1e-12 level.
    pub fn normalized(matrix: ComplexMatrix, split: Option<BipartiteSplit>) -> Result<Self> {
        let h = matrix.hermitian_part();
        let tr = h.trace().re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr} is not positive")));
        }
        Self::new(h.scale(1.0 / tr), split)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
            split: None,
        }
    }

    pub fn from_diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_diagonal(probabilities), None)
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            matrix: ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()),
            split: psi.split(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn split(&self) -> Option<BipartiteSplit> {
        self.split
    }

    pub fn with_split(mut self, split: BipartiteSplit) -> Result<Self> {
        split.check(self.dim())?;
        self.split = Some(split);
        Ok(self)
    }

    pub fn require_split(&self) -> Result<BipartiteSplit> {
        self.split
            .ok_or_else(|| Error::DimensionMismatch("state carries no bipartite split".into()))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues_unchecked(self.matrix.inner())
    }

    pub fn rank(&self) -> usize {
        let vals = self.eigenvalues();
        let cutoff = super::linalg::rank_cutoff(&vals);
        vals.iter().filter(|&&l| l > cutoff).count()
    }

    /// Unitary conjugation `U ρ U†`.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::DimensionMismatch("unitary size".into()));
        }
        let m = &(u * &self.matrix) * &u.adjoint();
        Self::normalized(m, self.split)
    }

    /// `self ⊗ other` with the A factors grouped before the B factors.
    pub fn bipartite_tensor(&self, other: &Self) -> Result<Self> {
        let s1 = self.require_split()?;
        let s2 = other.require_split()?;
        let perm = bipartite_permutation(s1, s2);
        let big = super::matrix::tensor_product(&self.matrix, &other.matrix);
        let d = perm.len();
        let inner = big.inner();
        let m = DMatrix::from_fn(d, d, |i, j| inner[(perm[i], perm[j])]);
        Ok(Self {
            matrix: m.into(),
            split: Some(BipartiteSplit::new(s1.dim_a * s2.dim_a, s1.dim_b * s2.dim_b)?),
        })
    }

    /// `ρ^{⊗n}` as a bipartite state on `A^n ⊗ B^n`.
    pub fn bipartite_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("tensor power n must be >= 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.bipartite_tensor(self)?;
        }
        Ok(acc)
    }
}

/// Maps the `A1 A2 B1 B2` index to the Kronecker `A1 B1 A2 B2` index.
fn bipartite_permutation(s1: BipartiteSplit, s2: BipartiteSplit) -> Vec<usize> {
    let (a1, b1, a2, b2) = (s1.dim_a, s1.dim_b, s2.dim_a, s2.dim_b);
    let mut perm = Vec::with_capacity(a1 * a2 * b1 * b2);
    for x1 in 0..a1 {
        for x2 in 0..a2 {
            for y1 in 0..b1 {
                for y2 in 0..b2 {
                    perm.push((x1 * b1 + y1) * (a2 * b2) + x2 * b2 + y2);
                }
            }
        }
    }
    perm
}

/// Unit vector, optionally with a bipartite split.
#[derive(Clone, Debug)]
pub struct PureState {
    amplitudes: Vec<C64>,
    split: Option<BipartiteSplit>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>, split: Option<BipartiteSplit>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::DimensionMismatch("empty state vector".into()));
        }
        if let Some(s) = split {
            s.check(amplitudes.len())?;
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} differs from 1")));
        }
        Ok(Self { amplitudes, split })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<C64>, split: Option<BipartiteSplit>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("cannot normalize zero vector".into()));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(amplitudes, split)
    }

    pub fn basis(dim: usize, index: usize, split: Option<BipartiteSplit>) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidParameter(format!("basis index {index} >= {dim}")));
        }
        let mut v = vec![ZERO; dim];
        v[index] = C64::new(1.0, 0.0);
        Self::new(v, split)
    }

    /// `|a> ⊗ |b>` with split `(dim a, dim b)`.
    pub fn product(a: &[C64], b: &[C64]) -> Result<Self> {
        let split = BipartiteSplit::new(a.len(), b.len())?;
        Self::normalized(super::matrix::kron_vec(a, b), Some(split))
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn split(&self) -> Option<BipartiteSplit> {
        self.split
    }

    pub fn with_split(mut self, split: BipartiteSplit) -> Result<Self> {
        split.check(self.dim())?;
        self.split = Some(split);
        Ok(self)
    }

    pub fn require_split(&self) -> Result<BipartiteSplit> {
        self.split
            .ok_or_else(|| Error::DimensionMismatch("state carries no bipartite split".into()))
    }

    /// `self ⊗ other` with the A factors grouped before the B factors.
    pub fn bipartite_tensor(&self, other: &Self) -> Result<Self> {
        let s1 = self.require_split()?;
        let s2 = other.require_split()?;
        let perm = bipartite_permutation(s1, s2);
        let big = super::matrix::kron_vec(&self.amplitudes, &other.amplitudes);
        let v = perm.iter().map(|&p| big[p]).collect();
        Self::new(
            v,
            Some(BipartiteSplit::new(s1.dim_a * s2.dim_a, s1.dim_b * s2.dim_b)?),
        )
    }

    /// Coefficient matrix `C[a][b] = <a b|ψ>` for the given split.
    pub(crate) fn coefficient_matrix(&self, split: BipartiteSplit) -> DMatrix<C64> {
        DMatrix::from_row_slice(split.dim_a, split.dim_b, &self.amplitudes)
    }
}

/// Schmidt decomposition `|ψ> = Σ_k sqrt(λ_k) |a_k> ⊗ |b_k>`.
#[derive(Clone, Debug)]
pub struct SchmidtForm {
    /// `λ_k`, non-increasing, summing to one.
    pub coefficients: Vec<f64>,
    pub basis_a: Vec<Vec<C64>>,
    pub basis_b: Vec<Vec<C64>>,
    pub split: BipartiteSplit,
}

impl SchmidtForm {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Mass of the `m` largest coefficients.
    pub fn top_mass(&self, m: usize) -> f64 {
        self.coefficients.iter().take(m).sum()
    }

    pub fn reconstruct(&self) -> Vec<C64> {
        let mut v = vec![ZERO; self.split.total()];
        for (k, &lam) in self.coefficients.iter().enumerate() {
            let s = lam.sqrt();
            for (a, &xa) in self.basis_a[k].iter().enumerate() {
                for (b, &xb) in self.basis_b[k].iter().enumerate() {
                    v[a * self.split.dim_b + b] += xa * xb * s;
                }
            }
        }
        v
    }
}

/// Partial trace of an arbitrary operator on `A ⊗ B`, keeping `keep`.
pub fn partial_trace_operator(
    op: &ComplexMatrix,
    split: BipartiteSplit,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    if !op.is_square() {
        return Err(Error::DimensionMismatch("operator must be square".into()));
    }
    split.check(op.rows())?;
    let (da, db) = (split.dim_a, split.dim_b);
    let m = op.inner();
    let out = match keep {
        Subsystem::A => DMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|b| m[(i * db + b, j * db + b)]).sum()
        }),
        Subsystem::B => DMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|a| m[(a * db + i, a * db + j)]).sum()
        }),
    };
    Ok(out.into())
}

/// Reduced state on the kept subsystem.
pub fn partial_trace(
    rho: &DensityMatrix,
    split: BipartiteSplit,
    keep: Subsystem,
) -> Result<DensityMatrix> {
    let reduced = partial_trace_operator(rho.matrix(), split, keep)?;
    DensityMatrix::normalized(reduced, None)
}

/// Unnormalized reduced operator `Tr_B |v><v|` straight from the amplitudes.
pub(crate) fn reduced_a_of_vector(v: &[C64], split: BipartiteSplit) -> DMatrix<C64> {
    let (da, db) = (split.dim_a, split.dim_b);
    DMatrix::from_fn(da, da, |i, j| {
        (0..db).map(|b| v[i * db + b] * v[j * db + b].conj()).sum()
    })
}

pub fn schmidt_decompose(psi: &PureState, split: BipartiteSplit) -> Result<SchmidtForm> {
    split.check(psi.dim())?;
    let c = psi.coefficient_matrix(split);
    let svd = c.svd(true, true);
    let u = svd.u.expect("svd computed u");
    let v_t = svd.v_t.expect("svd computed v_t");
    let r = split.min_local();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let mut coefficients: Vec<f64> = order
        .iter()
        .map(|&k| svd.singular_values[k].powi(2))
        .collect();
    let total: f64 = coefficients.iter().sum();
    for c in &mut coefficients {
        *c /= total;
    }
    let basis_a = order
        .iter()
        .map(|&k| u.column(k).iter().copied().collect())
        .collect();
    let basis_b = order
        .iter()
        .map(|&k| v_t.row(k).iter().copied().collect())
        .collect();
    Ok(SchmidtForm {
        coefficients,
        basis_a,
        basis_b,
        split,
    })
}

/// Canonical maximally entangled state of Schmidt rank `m` on the first `m`
/// basis pairs.
pub fn maximally_entangled(m: usize, split: BipartiteSplit) -> Result<PureState> {
    if m == 0 || m > split.min_local() {
        return Err(Error::InvalidParameter(format!(
            "Schmidt rank {m} outside 1..={}",
            split.min_local()
        )));
    }
    let mut v = vec![ZERO; split.total()];
    let amp = C64::new(1.0 / (m as f64).sqrt(), 0.0);
    for i in 0..m {
        v[i * split.dim_b + i] = amp;
    }
    PureState::new(v, Some(split))
}

/// Canonical purification `Σ_j sqrt(λ_j) |e_j> ⊗ |j>` over the support of
/// `rho`; the reference dimension equals the rank.
pub fn purify(rho: &DensityMatrix) -> Result<PureState> {
    let eig = hermitian_eig(rho.matrix())?;
    let r = eig.rank().max(1);
    let d = rho.dim();
    let mut v = vec![ZERO; d * r];
    for j in 0..r {
        let s = eig.values[j].max(0.0).sqrt();
        for i in 0..d {
            v[i * r + j] = eig.vectors.get(i, j) * s;
        }
    }
    PureState::normalized(v, Some(BipartiteSplit::new(d, r)?))
}

/// Schmidt coefficients straight from singular values, non-increasing.
pub fn schmidt_coefficients(psi: &PureState, split: BipartiteSplit) -> Result<Vec<f64>> {
    split.check(psi.dim())?;
    let c: ComplexMatrix = psi.coefficient_matrix(split).into();
    Ok(singular_values(&c).into_iter().map(|s| s * s).collect())
}
