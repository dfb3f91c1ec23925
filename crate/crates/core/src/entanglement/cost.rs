//! Finite-n proxy for the entanglement cost: the half crossing of the
//! conditional spectrum `f_n(γ)` of a cq-extension, minimized over
//! decompositions.

use super::eof::{state_rank, EntanglementReport, EofOptions, SEARCH_DIM_CAP};
use super::ensemble::{ensemble_from_vectors, reduced_spectrum, CqExtension, Ensemble};
use super::optimizer::{search_decompositions, MemberObjective};
use crate::error::{Error, Result};
use crate::qcore::matrix::C64;
use crate::qcore::state::{BipartiteSplit, DensityMatrix, PureState};
use crate::spectra::types::RatioProfile;
use crate::spectra::{default_gamma_grid, CqLevel};

/// Target of the cost proxy.
#[derive(Clone, Debug)]
pub enum CostSource {
    /// n copies of a base state.
    Iid(DensityMatrix),
    /// The n-th state given directly.
    Explicit(DensityMatrix),
}

/// Conditional-axis half crossing of `f_n` for the cq-extension formed by
/// the members.
pub struct MidpointObjective {
    pub split: BipartiteSplit,
    pub n: usize,
    pub grid: Vec<f64>,
}

impl MemberObjective for MidpointObjective {
    /// `(ln w, ln μ_k)` for a member of weight `w` and reduced spectrum `μ`.
    type Summary = (f64, Vec<f64>);

    fn summarize(&self, v: &[C64]) -> Self::Summary {
        let mu = reduced_spectrum(v, self.split);
        let w: f64 = mu.iter().filter(|&&m| m > 0.0).sum();
        let logs = mu.into_iter().filter(|&m| m > 0.0).map(f64::ln).collect();
        (if w > 0.0 { w.ln() } else { f64::NEG_INFINITY }, logs)
    }

    fn combine(&self, summaries: &[Self::Summary]) -> f64 {
        let entries = summaries
            .iter()
            .filter(|(lw, _)| lw.is_finite())
            .flat_map(|(lw, logs)| logs.iter().map(move |&l| (l, *lw, 1.0)))
            .collect();
        CqLevel::from_profile(self.n, RatioProfile::new(entries)).midpoint(&self.grid)
    }
}

/// Minimum over searched cq-extensions of the n-th state of the half crossing
/// of `f_n` on the conditional-entropy axis (default grid).
///
/// A pure i.i.d. target admits only the trivial decomposition; its crossing
/// is evaluated from type classes at any n and the witness is the base state
/// with `witness_copies = n`. Otherwise the n-th state is built explicitly
/// (at most 256 dimensions) and searched with `member_count` members
/// (default: its rank).
pub fn cost_proxy_minimize(
    source: &CostSource,
    n: usize,
    options: &EofOptions,
) -> Result<EntanglementReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let grid = default_gamma_grid();
    if let CostSource::Iid(rho) = source {
        let (eig, rank) = state_rank(rho)?;
        if rank == 1 {
            let split = rho.require_split()?;
            let psi = PureState::normalized(eig.vector(0), Some(split))?;
            let witness = Ensemble::single(psi)?;
            let level = CqLevel::iid(&CqExtension::new(witness.clone()), n)?;
            return Ok(EntanglementReport {
                value_nats: level.midpoint(&grid),
                witness,
                witness_copies: n,
                member_count: 1,
                restarts_used: 0,
                converged: true,
            });
        }
    }
    let target = match source {
        CostSource::Iid(rho) => {
            let split = rho.require_split()?;
            let dim = (split.total() as u128).checked_pow(n as u32);
            if dim.is_none_or(|d| d > SEARCH_DIM_CAP as u128) {
                return Err(Error::DimensionCap {
                    dim: dim.map_or(usize::MAX, |d| usize::try_from(d).unwrap_or(usize::MAX)),
                    cap: SEARCH_DIM_CAP,
                });
            }
            rho.bipartite_power(n)?
        }
        CostSource::Explicit(rho) => {
            if rho.dim() > SEARCH_DIM_CAP {
                return Err(Error::DimensionCap {
                    dim: rho.dim(),
                    cap: SEARCH_DIM_CAP,
                });
            }
            rho.clone()
        }
    };
    let split = target.require_split()?;
    let (eig, rank) = state_rank(&target)?;
    let k = options.member_count.unwrap_or(rank);
    if k < rank {
        return Err(Error::InvalidParameter(format!(
            "member count {k} below rank {rank}"
        )));
    }
    let objective = MidpointObjective { split, n, grid };
    let best = search_decompositions(&objective, &eig, rank, k, None, &options.search);
    Ok(EntanglementReport {
        value_nats: best.value,
        witness: ensemble_from_vectors(&best.members, split)?,
        witness_copies: 1,
        member_count: k,
        restarts_used: options.search.restarts.max(1),
        converged: best.converged,
    })
}
