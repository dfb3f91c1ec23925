use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qcore::linalg::{eigenvalues_unchecked, hermitian_eig, Eigen};
use crate::qcore::matrix::{ComplexMatrix, C64, ZERO};
use crate::qcore::measures::entropy_of_spectrum;
use crate::qcore::state::{
    reduced_a_of_vector, BipartiteSplit, DensityMatrix, PureState,
};

/// Pure-state decomposition `{p_i, |φ_i>}` with a common bipartite split.
#[derive(Clone, Debug)]
pub struct Ensemble {
    probabilities: Vec<f64>,
    members: Vec<PureState>,
    split: BipartiteSplit,
}

impl Ensemble {
    /// Probabilities must be non-negative and sum to one within 1e-9; they
    /// are rescaled to sum exactly.
    pub fn new(probabilities: Vec<f64>, members: Vec<PureState>) -> Result<Self> {
        if probabilities.is_empty() || probabilities.len() != members.len() {
            return Err(Error::InvalidState(format!(
                "{} probabilities for {} members",
                probabilities.len(),
                members.len()
            )));
        }
        if probabilities.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidState("negative or non-finite probability".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        let split = members[0].require_split()?;
        if members.iter().any(|m| m.split() != Some(split)) {
            return Err(Error::DimensionMismatch("members with different splits".into()));
        }
        let probabilities = probabilities.into_iter().map(|p| p / total).collect();
        Ok(Self {
            probabilities,
            members,
            split,
        })
    }

    pub fn single(member: PureState) -> Result<Self> {
        Self::new(vec![1.0], vec![member])
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn members(&self) -> &[PureState] {
        &self.members
    }

    pub fn split(&self) -> BipartiteSplit {
        self.split
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &PureState)> {
        self.probabilities.iter().copied().zip(self.members.iter())
    }

    /// `Σ p_i |φ_i><φ_i|`.
    pub fn mixture(&self) -> Result<DensityMatrix> {
        let d = self.split.total();
        let mut m = DMatrix::<C64>::zeros(d, d);
        for (p, member) in self.iter() {
            if p == 0.0 {
                continue;
            }
            let v = member.amplitudes();
            for i in 0..d {
                let vi = v[i] * p;
                for j in 0..d {
                    m[(i, j)] += vi * v[j].conj();
                }
            }
        }
        DensityMatrix::normalized(m.into(), Some(self.split))
    }

    /// Eigenvalues of each member's reduced state `Tr_B |φ_i><φ_i|`.
    pub fn reduced_spectra(&self) -> Vec<Vec<f64>> {
        self.members
            .iter()
            .map(|m| reduced_spectrum(m.amplitudes(), self.split))
            .collect()
    }

    /// n-fold product ensemble: members are tensor products of member
    /// sequences with product weights. Member count grows as `K^n`.
    pub fn product_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        let mut probs = self.probabilities.clone();
        let mut members = self.members.clone();
        for _ in 1..n {
            let mut next_p = Vec::with_capacity(probs.len() * self.len());
            let mut next_m = Vec::with_capacity(probs.len() * self.len());
            for (p, m) in probs.iter().zip(&members) {
                for (q, base) in self.iter() {
                    next_p.push(p * q);
                    next_m.push(m.bipartite_tensor(base)?);
                }
            }
            probs = next_p;
            members = next_m;
        }
        Self::new(probs, members)
    }
}

/// Eigenvalues (non-increasing) of `Tr_B |v><v|` for a possibly unnormalized
/// vector; the smaller side of the split is used.
pub(crate) fn reduced_spectrum(v: &[C64], split: BipartiteSplit) -> Vec<f64> {
    let m = if split.dim_a <= split.dim_b {
        reduced_a_of_vector(v, split)
    } else {
        let (da, db) = (split.dim_a, split.dim_b);
        DMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|a| v[a * db + i] * v[a * db + j].conj()).sum()
        })
    };
    eigenvalues_unchecked(&m)
}

/// Classical-quantum extension `Σ p_i |i><i|_R ⊗ |φ_i><φ_i|` of an ensemble.
#[derive(Clone, Debug)]
pub struct CqExtension {
    ensemble: Ensemble,
}

impl CqExtension {
    pub fn new(ensemble: Ensemble) -> Self {
        Self { ensemble }
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    pub fn flag_dimension(&self) -> usize {
        self.ensemble.len()
    }

    /// `ρ_RA = Σ p_i |i><i| ⊗ Tr_B |φ_i><φ_i|`, split `(K, d_A)`.
    pub fn assemble_ra(&self) -> Result<DensityMatrix> {
        let k = self.flag_dimension();
        let da = self.ensemble.split.dim_a;
        let mut m = DMatrix::<C64>::zeros(k * da, k * da);
        for (i, (p, member)) in self.ensemble.iter().enumerate() {
            let red = reduced_a_of_vector(member.amplitudes(), self.ensemble.split);
            for r in 0..da {
                for c in 0..da {
                    m[(i * da + r, i * da + c)] = red[(r, c)] * p;
                }
            }
        }
        DensityMatrix::normalized(m.into(), Some(BipartiteSplit::new(k, da)?))
    }

    /// `ρ_RAB` with `R` first, split `(K, d_A d_B)`.
    pub fn assemble_rab(&self) -> Result<DensityMatrix> {
        let k = self.flag_dimension();
        let d = self.ensemble.split.total();
        let mut m = DMatrix::<C64>::zeros(k * d, k * d);
        for (i, (p, member)) in self.ensemble.iter().enumerate() {
            let v = member.amplitudes();
            for r in 0..d {
                for c in 0..d {
                    m[(i * d + r, i * d + c)] = v[r] * v[c].conj() * p;
                }
            }
        }
        DensityMatrix::normalized(m.into(), Some(BipartiteSplit::new(k, d)?))
    }

    /// `ρ_R ⊗ I_A` as an operator on `R ⊗ A`.
    pub fn flag_marginal_times_identity(&self) -> ComplexMatrix {
        let da = self.ensemble.split.dim_a;
        let diag: Vec<f64> = self
            .ensemble
            .probabilities
            .iter()
            .flat_map(|&p| std::iter::repeat_n(p, da))
            .collect();
        ComplexMatrix::from_diagonal(&diag)
    }
}

/// Builds the ensemble `{p_i, |φ_i>}` induced by a unitary `U` acting on the
/// reference of the canonical purification:
/// `sqrt(p_i) |φ_i> = Σ_j U_ij sqrt(λ_j) |e_j>`.
pub fn ensemble_from_isometry(
    rho: &DensityMatrix,
    unitary: &ComplexMatrix,
    member_count: usize,
) -> Result<Ensemble> {
    let split = rho.require_split()?;
    let eig = hermitian_eig(rho.matrix())?;
    let rank = eig.rank().max(1);
    if member_count < rank {
        return Err(Error::InvalidParameter(format!(
            "member count {member_count} below rank {rank}"
        )));
    }
    if unitary.rows() != member_count || unitary.cols() != member_count {
        return Err(Error::DimensionMismatch(format!(
            "unitary is {}x{}, expected {member_count}x{member_count}",
            unitary.rows(),
            unitary.cols()
        )));
    }
    let unitarity = (&unitary.adjoint() * unitary).max_abs_diff(&ComplexMatrix::identity(member_count));
    if unitarity > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "reference operator is not unitary (error {unitarity:.3e})"
        )));
    }
    let basis = purification_basis(&eig, rank);
    let vectors = member_vectors(unitary, &basis);
    ensemble_from_vectors(&vectors, split)
}

/// Columns `sqrt(λ_j) |e_j>` for the support of `rho`.
pub(crate) fn purification_basis(eig: &Eigen, rank: usize) -> Vec<Vec<C64>> {
    (0..rank)
        .map(|j| {
            let s = eig.values[j].max(0.0).sqrt();
            eig.vector(j).into_iter().map(|z| z * s).collect()
        })
        .collect()
}

/// Unnormalized member vectors `Σ_j U_ij b_j`.
pub(crate) fn member_vectors(unitary: &ComplexMatrix, basis: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let d = basis.first().map_or(0, |b| b.len());
    (0..unitary.rows())
        .map(|i| {
            let mut v = vec![ZERO; d];
            for (j, b) in basis.iter().enumerate() {
                let u = unitary.get(i, j);
                if u == ZERO {
                    continue;
                }
                for (vk, bk) in v.iter_mut().zip(b) {
                    *vk += u * bk;
                }
            }
            v
        })
        .collect()
}

/// Normalizes unnormalized member vectors into an ensemble; zero vectors
/// become weight-zero members carrying the first basis vector.
pub(crate) fn ensemble_from_vectors(vectors: &[Vec<C64>], split: BipartiteSplit) -> Result<Ensemble> {
    let weights: Vec<f64> = vectors
        .iter()
        .map(|v| v.iter().map(|z| z.norm_sqr()).sum())
        .collect();
    let total: f64 = weights.iter().sum();
    let mut probs = Vec::with_capacity(vectors.len());
    let mut members = Vec::with_capacity(vectors.len());
    for (v, &w) in vectors.iter().zip(&weights) {
        if w > 1e-300 {
            probs.push(w / total);
            members.push(PureState::normalized(v.clone(), Some(split))?);
        } else {
            probs.push(0.0);
            members.push(PureState::basis(split.total(), 0, Some(split))?);
        }
    }
    Ensemble::new(probs, members)
}

/// Inverse of [`ensemble_from_isometry`]: a unitary on the reference that
/// reproduces the given ensemble of `rho`. The first `rank` columns are fixed
/// by the ensemble; the remaining columns complete the isometry.
pub fn isometry_from_ensemble(rho: &DensityMatrix, ensemble: &Ensemble) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(rho.matrix())?;
    let rank = eig.rank().max(1);
    let k = ensemble.len();
    if k < rank {
        return Err(Error::InvalidParameter(format!(
            "ensemble of {k} members cannot decompose a rank-{rank} state"
        )));
    }
    let mut cols: Vec<Vec<C64>> = (0..rank)
        .map(|j| {
            let e = eig.vector(j);
            let s = eig.values[j].max(0.0).sqrt();
            ensemble
                .iter()
                .map(|(p, m)| {
                    let overlap = crate::qcore::matrix::inner_product(&e, m.amplitudes());
                    overlap * p.sqrt() / s
                })
                .collect()
        })
        .collect();
    // Re-orthonormalize the isometry columns against rounding drift.
    for j in 0..cols.len() {
        for i in 0..j {
            let ov = crate::qcore::matrix::inner_product(&cols[i], &cols[j]);
            let ci = cols[i].clone();
            for (x, y) in cols[j].iter_mut().zip(&ci) {
                *x -= ov * y;
            }
        }
        let n = crate::qcore::matrix::vec_norm(&cols[j]);
        if n < 0.5 {
            return Err(Error::InvalidState(
                "ensemble does not decompose the given state".into(),
            ));
        }
        for x in &mut cols[j] {
            *x /= n;
        }
    }
    let full = crate::qcore::linalg::complete_basis(&cols, k);
    let mut u = ComplexMatrix::zeros(k, k);
    for (j, col) in full.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            u.set(i, j, z);
        }
    }
    Ok(u)
}

/// `Σ p_i S(Tr_B |φ_i><φ_i|)` in nats.
pub fn eof_objective(ensemble: &Ensemble) -> f64 {
    ensemble
        .iter()
        .map(|(p, m)| {
            if p == 0.0 {
                0.0
            } else {
                p * entropy_of_spectrum(&reduced_spectrum(m.amplitudes(), ensemble.split))
            }
        })
        .sum()
}

/// `S(A|R) = S(ρ_RA) − S(ρ_R)` from the assembled `ρ_RA`.
pub fn conditional_entropy_cq(cq: &CqExtension) -> Result<f64> {
    let ra = cq.assemble_ra()?;
    let s_ra = entropy_of_spectrum(&ra.eigenvalues());
    let s_r = entropy_of_spectrum(cq.ensemble.probabilities());
    Ok(s_ra - s_r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random::{haar_unitary, random_mixed, random_pure, rng_from_seed};
    use crate::qcore::state::maximally_entangled;

    fn split22() -> BipartiteSplit {
        BipartiteSplit::new(2, 2).unwrap()
    }

    #[test]
    fn rejects_bad_probabilities() {
        let m = PureState::basis(4, 0, Some(split22())).unwrap();
        assert!(Ensemble::new(vec![0.5], vec![m.clone()]).is_err());
        assert!(Ensemble::new(vec![1.5, -0.5], vec![m.clone(), m.clone()]).is_err());
        assert!(Ensemble::new(vec![1.0], vec![PureState::basis(4, 0, None).unwrap()]).is_err());
    }

    #[test]
    fn eof_objective_cases() {
        let prod = PureState::basis(4, 0, Some(split22())).unwrap();
        let bell = maximally_entangled(2, split22()).unwrap();
        let e = Ensemble::new(vec![0.5, 0.5], vec![prod.clone(), prod.clone()]).unwrap();
        assert!(eof_objective(&e).abs() < 1e-14);
        let e = Ensemble::single(bell.clone()).unwrap();
        assert!((eof_objective(&e) - 2f64.ln()).abs() < 1e-12);
        let e = Ensemble::new(vec![0.5, 0.5], vec![bell, prod]).unwrap();
        assert!((eof_objective(&e) - 0.5 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn conditional_entropy_flag_degeneracy() {
        let bell = maximally_entangled(2, split22()).unwrap();
        let one = CqExtension::new(Ensemble::single(bell.clone()).unwrap());
        assert!((conditional_entropy_cq(&one).unwrap() - 2f64.ln()).abs() < 1e-12);
        let three = CqExtension::new(
            Ensemble::new(vec![1.0 / 3.0; 3], vec![bell.clone(), bell.clone(), bell]).unwrap(),
        );
        assert!((conditional_entropy_cq(&three).unwrap() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn identity_unitary_gives_eigen_ensemble() {
        let mut rng = rng_from_seed(11);
        let rho = random_mixed(&mut rng, 4, 3).unwrap().with_split(split22()).unwrap();
        let e = ensemble_from_isometry(&rho, &ComplexMatrix::identity(3), 3).unwrap();
        let eig = rho.eigenvalues();
        for (p, l) in e.probabilities().iter().zip(&eig) {
            assert!((p - l).abs() < 1e-12);
        }
        assert!(e.mixture().unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn pure_state_ignores_unitary() {
        let mut rng = rng_from_seed(2);
        let psi = random_pure(&mut rng, 4, Some(split22())).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let u = haar_unitary(&mut rng, 3);
        let e = ensemble_from_isometry(&rho, &u, 3).unwrap();
        for (p, m) in e.iter() {
            if p > 0.0 {
                let ov = crate::qcore::matrix::inner_product(m.amplitudes(), psi.amplitudes());
                assert!((ov.norm() - 1.0).abs() < 1e-12);
            }
        }
        let single = ensemble_from_isometry(&rho, &ComplexMatrix::identity(1), 1).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn member_count_below_rank_is_rejected() {
        let rho = DensityMatrix::maximally_mixed(4).with_split(split22()).unwrap();
        assert!(ensemble_from_isometry(&rho, &ComplexMatrix::identity(2), 2).is_err());
    }

    #[test]
    fn product_power_weights() {
        let a = PureState::basis(4, 0, Some(split22())).unwrap();
        let b = maximally_entangled(2, split22()).unwrap();
        let e = Ensemble::new(vec![0.25, 0.75], vec![a, b]).unwrap();
        let e2 = e.product_power(2).unwrap();
        assert_eq!(e2.len(), 4);
        assert!((e2.probabilities()[3] - 0.5625).abs() < 1e-15);
        assert!((eof_objective(&e2) - 2.0 * eof_objective(&e)).abs() < 1e-12);
    }
}
