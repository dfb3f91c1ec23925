use serde_json::{json, Value};

use super::ensemble::{ensemble_from_vectors, isometry_from_ensemble, Ensemble};
use super::optimizer::{search_decompositions, AverageEntropy, SearchOptions};
use crate::error::{Error, Result};
use crate::qcore::io::{state_to_value, StateFile};
use crate::qcore::linalg::hermitian_eig;
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::state::DensityMatrix;

/// Largest ambient dimension accepted by the regularized and cost-proxy
/// searches.
pub const SEARCH_DIM_CAP: usize = 256;

#[derive(Clone, Copy, Debug, Default)]
pub struct EofOptions {
    /// Number of ensemble members; `None` picks the default for the call.
    pub member_count: Option<usize>,
    pub search: SearchOptions,
}

/// Result of a minimization over ensemble decompositions.
#[derive(Clone, Debug)]
pub struct EntanglementReport {
    pub value_nats: f64,
    /// The minimizing decomposition. When `witness_copies > 1` the actual
    /// decomposition is its `witness_copies`-fold product.
    pub witness: Ensemble,
    pub witness_copies: usize,
    pub member_count: usize,
    pub restarts_used: usize,
    pub converged: bool,
}

impl EntanglementReport {
    pub fn value_bits(&self) -> f64 {
        self.value_nats / std::f64::consts::LN_2
    }

    pub fn to_json(&self) -> Result<Value> {
        Ok(json!({
            "value_nats": self.value_nats,
            "value_bits": self.value_bits(),
            "member_count": self.member_count,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
            "witness_copies": self.witness_copies,
            "witness": state_to_value(&StateFile::Ensemble(self.witness.clone()))?,
        }))
    }
}

pub(crate) fn state_rank(rho: &DensityMatrix) -> Result<(crate::qcore::linalg::Eigen, usize)> {
    let eig = hermitian_eig(rho.matrix())?;
    let rank = eig.rank().max(1);
    Ok((eig, rank))
}

/// Entanglement of formation by search over `member_count`-element
/// decompositions (default `rank²`).
pub fn eof_minimize(rho: &DensityMatrix, options: &EofOptions) -> Result<EntanglementReport> {
    eof_minimize_from(rho, options, None)
}

/// As [`eof_minimize`], with restart 0 started from the decomposition given
/// by `initial` (a unitary on the member index).
pub fn eof_minimize_from(
    rho: &DensityMatrix,
    options: &EofOptions,
    initial: Option<&ComplexMatrix>,
) -> Result<EntanglementReport> {
    let split = rho.require_split()?;
    let (eig, rank) = state_rank(rho)?;
    let k = options.member_count.unwrap_or(rank * rank);
    if k < rank {
        return Err(Error::InvalidParameter(format!(
            "member count {k} below rank {rank}"
        )));
    }
    if let Some(u) = initial {
        if u.rows() != k || u.cols() != k {
            return Err(Error::DimensionMismatch(format!(
                "initial unitary is {}x{}, expected {k}x{k}",
                u.rows(),
                u.cols()
            )));
        }
    }
    let objective = AverageEntropy { split };
    let best = search_decompositions(&objective, &eig, rank, k, initial, &options.search);
    Ok(EntanglementReport {
        value_nats: best.value,
        witness: ensemble_from_vectors(&best.members, split)?,
        witness_copies: 1,
        member_count: k,
        restarts_used: options.search.restarts.max(1),
        converged: best.converged,
    })
}

/// One row of a regularization study.
#[derive(Clone, Debug)]
pub struct RegularizedPoint {
    pub n: usize,
    /// `E_F(ρ^{⊗n}) / n` estimate in nats.
    pub value_per_copy: f64,
    pub report: EntanglementReport,
}

/// `E_F(ρ^{⊗n}) / n` for `n = 1..=n_max`, each searched over `K^n`-member
/// decompositions of the tensor power with `K` the base member count
/// (default: the rank). For `n >= 2` restart 0 starts from the n-fold product
/// of the `n = 1` minimizer, so `value(n) <= value(1)` up to rounding.
pub fn eof_regularized_estimate(
    rho: &DensityMatrix,
    n_max: usize,
    options: &EofOptions,
) -> Result<Vec<RegularizedPoint>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    let split = rho.require_split()?;
    let dim = (split.total() as u128).checked_pow(n_max as u32);
    if dim.is_none_or(|d| d > SEARCH_DIM_CAP as u128) {
        return Err(Error::DimensionCap {
            dim: dim.map_or(usize::MAX, |d| usize::try_from(d).unwrap_or(usize::MAX)),
            cap: SEARCH_DIM_CAP,
        });
    }
    let (_, rank) = state_rank(rho)?;
    let base_k = options.member_count.unwrap_or(rank);
    let base_opts = EofOptions {
        member_count: Some(base_k),
        search: options.search,
    };
    let first = eof_minimize(rho, &base_opts)?;
    let mut out = vec![RegularizedPoint {
        n: 1,
        value_per_copy: first.value_nats,
        report: first.clone(),
    }];
    for n in 2..=n_max {
        let rho_n = rho.bipartite_power(n)?;
        let start = first.witness.product_power(n)?;
        let k = start.len();
        let u = isometry_from_ensemble(&rho_n, &start)?;
        let opts = EofOptions {
            member_count: Some(k),
            search: options.search,
        };
        let report = eof_minimize_from(&rho_n, &opts, Some(&u))?;
        out.push(RegularizedPoint {
            n,
            value_per_copy: report.value_nats / n as f64,
            report,
        });
    }
    Ok(out)
}
