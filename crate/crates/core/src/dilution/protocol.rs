//! Register-level simulation of the dilution protocol.
//!
//! Alice holds `A ⊗ R ⊗ A′` in the cq state `Σ_j p_j |j><j|_R ⊗ |φ_j><φ_j|`,
//! rotates `R A′` with `Θ`, sends `A′` to Bob through the rank-`M` scissors
//! channel and `R` over a classical line; Bob undoes `Θ` on `R B` and discards
//! `R`. Everything is an exact density-matrix computation.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::entanglement::Ensemble;
use crate::error::{Error, Result};
use crate::qcore::linalg::complete_basis;
use crate::qcore::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::qcore::measures::fidelity;
use crate::qcore::state::{schmidt_decompose, BipartiteSplit, DensityMatrix, SchmidtForm};
use crate::spectra::SpectralProjector;

/// Largest `d_A · K · d_B` handled by [`simulate_dilution`].
pub const SIMULATION_DIM_CAP: usize = 1024;

/// How the rank-`M` resource transmits components beyond the first `M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScissorsVariant {
    /// Measure `{Q, I − Q}`; on failure Bob receives a flag state orthogonal
    /// to his original space.
    OrthogonalFlag,
    /// Teleport through the embedded rank-`M` maximally entangled state with
    /// shift/phase corrections; components outside the resource arrive
    /// maximally mixed on the resource subspace.
    WeylTeleport,
}

impl ScissorsVariant {
    pub fn label(self) -> &'static str {
        match self {
            ScissorsVariant::OrthogonalFlag => "orthogonal-flag",
            ScissorsVariant::WeylTeleport => "weyl-teleport",
        }
    }

    /// Whether Bob's space grows by a flag dimension for rank `m` out of `d_b`.
    fn extends(self, m: usize, d_b: usize) -> bool {
        self == ScissorsVariant::OrthogonalFlag && m < d_b
    }
}

impl fmt::Display for ScissorsVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ScissorsVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orthogonal-flag" | "flag" => Ok(ScissorsVariant::OrthogonalFlag),
            "weyl-teleport" | "weyl" => Ok(ScissorsVariant::WeylTeleport),
            other => Err(Error::InvalidParameter(format!(
                "unknown scissors variant {other:?} (expected orthogonal-flag or weyl-teleport)"
            ))),
        }
    }
}

/// `Q_A^{M,i}`: projector onto the top-`M` A-side Schmidt vectors of member `i`.
#[derive(Clone, Debug)]
pub struct TruncationProjector {
    pub member_index: usize,
    pub matrix: SpectralProjector,
    pub rank: usize,
}

fn check_rank(m: usize, split: BipartiteSplit) -> Result<()> {
    if m == 0 || m > split.min_local() {
        return Err(Error::InvalidParameter(format!(
            "resource rank {m} outside 1..={}",
            split.min_local()
        )));
    }
    Ok(())
}

pub fn truncation_projector(
    member: &SchmidtForm,
    member_index: usize,
    m: usize,
) -> Result<TruncationProjector> {
    check_rank(m, member.split)?;
    let d = member.split.dim_a;
    let mut q = ComplexMatrix::zeros(d, d);
    for a in &member.basis_a[..m] {
        q = &q + &ComplexMatrix::outer(a, a);
    }
    Ok(TruncationProjector {
        member_index,
        matrix: SpectralProjector::from_parts(q, m),
        rank: m,
    })
}

/// `U = Σ_l |l><b_l|`, taking the member's B-side Schmidt vectors to the
/// canonical basis in coefficient order (completed on the kernel).
fn alignment_unitary(member: &SchmidtForm) -> DMatrix<C64> {
    let d = member.split.dim_b;
    let basis = complete_basis(&member.basis_b, d);
    DMatrix::from_fn(d, d, |l, k| basis[l][k].conj())
}

/// Block-diagonal `Σ_j |j><j| ⊗ U_j` on `R ⊗ B`, each `U_j` padded by
/// identity up to `out_dim`.
fn controlled(blocks: &[DMatrix<C64>], out_dim: usize) -> DMatrix<C64> {
    let k = blocks.len();
    let mut m = DMatrix::zeros(k * out_dim, k * out_dim);
    for (j, u) in blocks.iter().enumerate() {
        let d = u.nrows();
        for x in 0..out_dim {
            for y in 0..out_dim {
                let v = if x < d && y < d {
                    u[(x, y)]
                } else if x == y {
                    ONE
                } else {
                    ZERO
                };
                m[(j * out_dim + x, j * out_dim + y)] = v;
            }
        }
    }
    m
}

/// `Θ = Σ_j |j><j|_R ⊗ Σ_l |l><ψ_B^{j,l}|` on `R ⊗ A′`.
pub fn theta_unitary(ensemble: &Ensemble) -> Result<ComplexMatrix> {
    let split = ensemble.split();
    let blocks = ensemble
        .members()
        .iter()
        .map(|m| schmidt_decompose(m, split).map(|s| alignment_unitary(&s)))
        .collect::<Result<Vec<_>>>()?;
    Ok(controlled(&blocks, split.dim_b).into())
}

/// Kraus operators `d_b -> d_out` of the scissors channel in the aligned
/// basis, where the resource occupies the first `m` levels.
fn scissors_kraus(variant: ScissorsVariant, m: usize, d_b: usize) -> (Vec<DMatrix<C64>>, usize) {
    let d_out = if variant.extends(m, d_b) { d_b + 1 } else { d_b };
    let mut q = DMatrix::zeros(d_out, d_b);
    for l in 0..m {
        q[(l, l)] = ONE;
    }
    let mut ops = vec![q];
    for k in m..d_b {
        match variant {
            ScissorsVariant::OrthogonalFlag => {
                let mut e = DMatrix::zeros(d_out, d_b);
                e[(d_b, k)] = ONE;
                ops.push(e);
            }
            ScissorsVariant::WeylTeleport => {
                let amp = C64::new(1.0 / (m as f64).sqrt(), 0.0);
                for l in 0..m {
                    let mut e = DMatrix::zeros(d_out, d_b);
                    e[(l, k)] = amp;
                    ops.push(e);
                }
            }
        }
    }
    (ops, d_out)
}

/// Applies `X -> f(X)` to every `d_in × d_in` block of a `left·d_in` square
/// matrix, i.e. a map acting on the last tensor factor.
fn map_last_factor(
    rho: &DMatrix<C64>,
    left: usize,
    d_in: usize,
    d_out: usize,
    f: impl Fn(&DMatrix<C64>) -> DMatrix<C64>,
) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(left * d_out, left * d_out);
    for x in 0..left {
        for y in 0..left {
            let block = rho.view((x * d_in, y * d_in), (d_in, d_in)).into_owned();
            out.view_mut((x * d_out, y * d_out), (d_out, d_out))
                .copy_from(&f(&block));
        }
    }
    out
}

fn apply_kraus(ops: &[DMatrix<C64>], x: &DMatrix<C64>) -> DMatrix<C64> {
    let mut acc = DMatrix::zeros(ops[0].nrows(), ops[0].nrows());
    for e in ops {
        acc += e * x * e.adjoint();
    }
    acc
}

fn conjugate_by(u: &DMatrix<C64>) -> impl Fn(&DMatrix<C64>) -> DMatrix<C64> + '_ {
    move |x| u * x * u.adjoint()
}

/// Output of the scissors channel on one member.
#[derive(Clone, Debug)]
pub struct ScissorsOutput {
    /// State on `A ⊗ B`, with `B` one level larger when `flagged`.
    pub state: DensityMatrix,
    /// `q = Σ_{j<M} λ_j`, the weight that passes the truncation.
    pub kept_weight: f64,
    pub flagged: bool,
}

/// Sends the B half of `member` through the rank-`m` scissors channel.
///
/// Orthogonal-flag output: `|φ̂><φ̂| + Σ_{k>=M} λ_k |a_k><a_k| ⊗ |⊥><⊥|` with
/// `|φ̂> = (Q ⊗ I)|φ>`. The flag level is appended to B only when
/// `m < d_B`.
pub fn scissors_channel(
    member: &SchmidtForm,
    m: usize,
    variant: ScissorsVariant,
) -> Result<ScissorsOutput> {
    let split = member.split;
    check_rank(m, split)?;
    let (d_a, d_b) = (split.dim_a, split.dim_b);
    let psi = member.reconstruct();
    let rho = DMatrix::from_fn(split.total(), split.total(), |i, j| psi[i] * psi[j].conj());
    let u = alignment_unitary(member);
    let (ops, d_out) = scissors_kraus(variant, m, d_b);
    let mut u_back = DMatrix::identity(d_out, d_out);
    u_back.view_mut((0, 0), (d_b, d_b)).copy_from(&u);
    let aligned = map_last_factor(&rho, d_a, d_b, d_b, conjugate_by(&u));
    let sent = map_last_factor(&aligned, d_a, d_b, d_out, |x| apply_kraus(&ops, x));
    let back = u_back.adjoint();
    let out = map_last_factor(&sent, d_a, d_out, d_out, conjugate_by(&back));
    let out_split = BipartiteSplit::new(d_a, d_out)?;
    Ok(ScissorsOutput {
        state: DensityMatrix::normalized(out.into(), Some(out_split))?,
        kept_weight: member.top_mass(m),
        flagged: d_out > d_b,
    })
}

/// `F² = Σ_i p_i Σ_{j<M} λ_j^i`, returned as `F`.
pub fn dilution_fidelity_formula(ensemble: &Ensemble, m: usize) -> Result<f64> {
    Ok(kept_weights(ensemble, m)?.0.sqrt())
}

/// `(Σ p_i q_i, q)` with `q_i` the top-`m` Schmidt mass of member `i`.
fn kept_weights(ensemble: &Ensemble, m: usize) -> Result<(f64, Vec<f64>)> {
    let split = ensemble.split();
    check_rank(m, split)?;
    let q = ensemble
        .members()
        .iter()
        .map(|psi| schmidt_decompose(psi, split).map(|s| s.top_mass(m)))
        .collect::<Result<Vec<_>>>()?;
    let avg = ensemble.probabilities().iter().zip(&q).map(|(p, q)| p * q).sum();
    Ok((avg, q))
}

/// Outcome of one protocol run.
#[derive(Clone, Debug, Serialize)]
pub struct DilutionReport {
    /// Block length the ensemble stands for; only enters `rate_nats`.
    pub n: usize,
    pub m_rank: usize,
    /// `ln(M) / n`.
    pub rate_nats: f64,
    pub fidelity_sim: f64,
    pub fidelity_formula: f64,
    /// `(Σ p_i q_i)²`.
    pub lower_bound: f64,
    /// `Σ p_i q_i`.
    pub upper_bound: f64,
    pub variant: ScissorsVariant,
}

impl DilutionReport {
    /// The same run reinterpreted as a block of `n` copies.
    pub fn with_block_length(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        self.n = n;
        self.rate_nats = (self.m_rank as f64).ln() / n as f64;
        Ok(self)
    }

    pub fn rate_bits(&self) -> f64 {
        self.rate_nats / std::f64::consts::LN_2
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "m_rank": self.m_rank,
            "rate_nats": self.rate_nats,
            "rate_bits": self.rate_bits(),
            "fidelity_sim": self.fidelity_sim,
            "fidelity_formula": self.fidelity_formula,
            "f2_sim": self.fidelity_sim * self.fidelity_sim,
            "f2_formula": self.fidelity_formula * self.fidelity_formula,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "variant": self.variant.label(),
        })
    }
}

/// State on `A ⊗ B′` that Bob and Alice share at the end of the protocol,
/// where `B′` has the flag level when the variant appends one.
pub fn dilution_output(
    ensemble: &Ensemble,
    m: usize,
    variant: ScissorsVariant,
) -> Result<DensityMatrix> {
    let split = ensemble.split();
    check_rank(m, split)?;
    let (d_a, d_b, k) = (split.dim_a, split.dim_b, ensemble.len());
    let total = d_a * k * d_b;
    if total > SIMULATION_DIM_CAP {
        return Err(Error::DimensionCap {
            dim: total,
            cap: SIMULATION_DIM_CAP,
        });
    }
    // Alice's cq state on A ⊗ R ⊗ A′.
    let mut rho = DMatrix::<C64>::zeros(total, total);
    for (j, (p, psi)) in ensemble.iter().enumerate() {
        let amps = psi.amplitudes();
        for a in 0..d_a {
            for b in 0..d_b {
                let x = (a * k + j) * d_b + b;
                for a2 in 0..d_a {
                    for b2 in 0..d_b {
                        let y = (a2 * k + j) * d_b + b2;
                        rho[(x, y)] += amps[a * d_b + b] * amps[a2 * d_b + b2].conj() * p;
                    }
                }
            }
        }
    }
    let theta = theta_unitary(ensemble)?.into_inner();
    let rho = map_last_factor(&rho, d_a, k * d_b, k * d_b, conjugate_by(&theta));

    // R travels as a classical register.
    let mut rho = rho;
    for x in 0..total {
        for y in 0..total {
            if (x / d_b) % k != (y / d_b) % k {
                rho[(x, y)] = ZERO;
            }
        }
    }

    let (ops, d_out) = scissors_kraus(variant, m, d_b);
    let rho = map_last_factor(&rho, d_a * k, d_b, d_out, |x| apply_kraus(&ops, x));

    let blocks: Vec<DMatrix<C64>> = (0..k)
        .map(|j| theta.view((j * d_b, j * d_b), (d_b, d_b)).into_owned())
        .collect();
    let correction = controlled(&blocks, d_out).adjoint();
    let rho = map_last_factor(&rho, d_a, k * d_out, k * d_out, conjugate_by(&correction));

    let out = DMatrix::from_fn(d_a * d_out, d_a * d_out, |x, y| {
        let (a, c) = (x / d_out, x % d_out);
        let (a2, c2) = (y / d_out, y % d_out);
        (0..k)
            .map(|r| rho[((a * k + r) * d_out + c, (a2 * k + r) * d_out + c2)])
            .sum()
    });
    DensityMatrix::normalized(out.into(), Some(BipartiteSplit::new(d_a, d_out)?))
}

/// Zero-pads B of a state on `A ⊗ B` up to `d_out` levels.
fn pad_b(rho: &DensityMatrix, d_out: usize) -> Result<DensityMatrix> {
    let split = rho.require_split()?;
    let (d_a, d_b) = (split.dim_a, split.dim_b);
    if d_out == d_b {
        return Ok(rho.clone());
    }
    let m = rho.matrix();
    let padded = DMatrix::from_fn(d_a * d_out, d_a * d_out, |x, y| {
        let (a, b) = (x / d_out, x % d_out);
        let (a2, b2) = (y / d_out, y % d_out);
        if b < d_b && b2 < d_b {
            m.get(a * d_b + b, a2 * d_b + b2)
        } else {
            ZERO
        }
    });
    DensityMatrix::new(padded.into(), Some(BipartiteSplit::new(d_a, d_out)?))
}

/// Runs the protocol once for the ensemble's mixture as target.
pub fn simulate_dilution(
    ensemble: &Ensemble,
    m: usize,
    variant: ScissorsVariant,
) -> Result<DilutionReport> {
    let output = dilution_output(ensemble, m, variant)?;
    let d_out = output.require_split()?.dim_b;
    let target = pad_b(&ensemble.mixture()?, d_out)?;
    let (avg, _) = kept_weights(ensemble, m)?;
    Ok(DilutionReport {
        n: 1,
        m_rank: m,
        rate_nats: (m as f64).ln(),
        fidelity_sim: fidelity(&output, &target)?.clamp(0.0, 1.0),
        fidelity_formula: avg.sqrt().min(1.0),
        lower_bound: avg * avg,
        upper_bound: avg,
        variant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::ComplexMatrix;
    use crate::qcore::random::{random_pure, random_probabilities, rng_from_seed};
    use crate::qcore::state::{maximally_entangled, PureState};

    const VARIANTS: [ScissorsVariant; 2] =
        [ScissorsVariant::OrthogonalFlag, ScissorsVariant::WeylTeleport];

    fn bell() -> PureState {
        maximally_entangled(2, BipartiteSplit::new(2, 2).unwrap()).unwrap()
    }

    fn schmidt_state(lambda: &[f64]) -> PureState {
        let d = lambda.len();
        let mut v = vec![ZERO; d * d];
        for (i, l) in lambda.iter().enumerate() {
            v[i * d + i] = C64::new(l.sqrt(), 0.0);
        }
        PureState::new(v, Some(BipartiteSplit::new(d, d).unwrap())).unwrap()
    }

    #[test]
    fn variant_labels_round_trip() {
        for v in VARIANTS {
            assert_eq!(v.label().parse::<ScissorsVariant>().unwrap(), v);
            assert_eq!(serde_json::to_value(v).unwrap(), v.label());
        }
        assert!("scissors".parse::<ScissorsVariant>().is_err());
    }

    #[test]
    fn theta_is_identity_for_aligned_member() {
        let e = Ensemble::single(schmidt_state(&[0.7, 0.3])).unwrap();
        let theta = theta_unitary(&e).unwrap();
        assert!(theta.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn theta_blocks_align_each_member() {
        let mut rng = rng_from_seed(3);
        let split = BipartiteSplit::new(2, 3).unwrap();
        let members: Vec<PureState> = (0..3)
            .map(|_| random_pure(&mut rng, split.total(), Some(split)).unwrap())
            .collect();
        let e = Ensemble::new(random_probabilities(&mut rng, 3), members).unwrap();
        let theta = theta_unitary(&e).unwrap();
        let gram = &theta.adjoint() * &theta;
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(9)) < 1e-9);
        for (j, psi) in e.members().iter().enumerate() {
            let s = schmidt_decompose(psi, split).unwrap();
            for (l, b) in s.basis_b.iter().enumerate() {
                let mut lifted = vec![ZERO; 9];
                lifted[j * 3..j * 3 + 3].copy_from_slice(b);
                let image = theta.mul_vec(&lifted);
                for (x, z) in image.iter().enumerate() {
                    let want = if x == j * 3 + l { 1.0 } else { 0.0 };
                    assert!((z - C64::new(want, 0.0)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn truncation_projector_has_rank_m() {
        let s = schmidt_decompose(&schmidt_state(&[0.5, 0.3, 0.2]), BipartiteSplit::new(3, 3).unwrap())
            .unwrap();
        let q = truncation_projector(&s, 0, 2).unwrap();
        assert_eq!(q.rank, 2);
        let m = q.matrix.matrix();
        assert!((m.trace().re - 2.0).abs() < 1e-12);
        assert!((m * m).max_abs_diff(m) < 1e-12);
        assert!(truncation_projector(&s, 0, 4).is_err());
    }

    #[test]
    fn scissors_full_rank_is_identity() {
        let mut rng = rng_from_seed(8);
        let split = BipartiteSplit::new(3, 3).unwrap();
        let psi = random_pure(&mut rng, 9, Some(split)).unwrap();
        let s = schmidt_decompose(&psi, split).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        for v in VARIANTS {
            let out = scissors_channel(&s, 3, v).unwrap();
            assert!(!out.flagged);
            assert!(out.state.matrix().max_abs_diff(rho.matrix()) < 1e-12);
        }
    }

    #[test]
    fn scissors_bell_flag_weight() {
        let split = BipartiteSplit::new(2, 2).unwrap();
        let s = schmidt_decompose(&bell(), split).unwrap();
        let out = scissors_channel(&s, 1, ScissorsVariant::OrthogonalFlag).unwrap();
        assert!((out.kept_weight - 0.5).abs() < 1e-12);
        assert!(out.flagged);
        // Flag level of B is index 2 in the extended space.
        let m = out.state.matrix();
        let flag_mass: f64 = (0..2).map(|a| m.get(a * 3 + 2, a * 3 + 2).re).sum();
        assert!((flag_mass - 0.5).abs() < 1e-12);
    }

    #[test]
    fn scissors_kept_weight_matches_top_mass() {
        let mut rng = rng_from_seed(21);
        let split = BipartiteSplit::new(4, 4).unwrap();
        let psi = random_pure(&mut rng, 16, Some(split)).unwrap();
        let s = schmidt_decompose(&psi, split).unwrap();
        let out = scissors_channel(&s, 2, ScissorsVariant::OrthogonalFlag).unwrap();
        let mut lam = s.coefficients.clone();
        lam.sort_by(|a, b| b.total_cmp(a));
        assert!((out.kept_weight - lam[0] - lam[1]).abs() < 1e-9);
        // The unflagged block is the projected pure state.
        let m = out.state.matrix();
        let kept: f64 = (0..4).flat_map(|a| (0..4).map(move |b| (a, b)))
            .map(|(a, b)| m.get(a * 5 + b, a * 5 + b).re)
            .sum();
        assert!((kept - out.kept_weight).abs() < 1e-9);
    }

    #[test]
    fn bell_examples() {
        let e = Ensemble::single(bell()).unwrap();
        for v in VARIANTS {
            let full = simulate_dilution(&e, 2, v).unwrap();
            assert!((full.fidelity_sim - 1.0).abs() < 1e-9);
        }
        let r = simulate_dilution(&e, 1, ScissorsVariant::OrthogonalFlag).unwrap();
        let f2 = r.fidelity_sim.powi(2);
        assert!((0.25 - 1e-12..=0.5 + 1e-12).contains(&f2), "{f2}");
        assert!((r.fidelity_formula.powi(2) - 0.5).abs() < 1e-12);
        let product = PureState::basis(4, 0, Some(BipartiteSplit::new(2, 2).unwrap())).unwrap();
        let e = Ensemble::single(product).unwrap();
        for v in VARIANTS {
            assert!((simulate_dilution(&e, 1, v).unwrap().fidelity_sim - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn formula_weighted_sum() {
        let e = Ensemble::new(
            vec![0.5, 0.5],
            vec![schmidt_state(&[0.8, 0.2]), schmidt_state(&[0.6, 0.4])],
        )
        .unwrap();
        let f = dilution_fidelity_formula(&e, 1).unwrap();
        assert!((f * f - 0.7).abs() < 1e-12);
        assert!((dilution_fidelity_formula(&e, 2).unwrap() - 1.0).abs() < 1e-12);
        assert!(dilution_fidelity_formula(&e, 0).is_err());
    }

    #[test]
    fn simulation_matches_member_wise_channel() {
        // Oracle: with R classical the protocol acts member by member.
        let mut rng = rng_from_seed(5);
        let split = BipartiteSplit::new(3, 3).unwrap();
        let members: Vec<PureState> = (0..2)
            .map(|_| random_pure(&mut rng, 9, Some(split)).unwrap())
            .collect();
        let e = Ensemble::new(vec![0.3, 0.7], members).unwrap();
        for v in VARIANTS {
            let out = dilution_output(&e, 2, v).unwrap();
            let mut expect = ComplexMatrix::zeros(out.dim(), out.dim());
            for (p, psi) in e.iter() {
                let s = schmidt_decompose(psi, split).unwrap();
                let o = scissors_channel(&s, 2, v).unwrap();
                expect = &expect + &o.state.matrix().scale(p);
            }
            assert!(out.matrix().max_abs_diff(&expect) < 1e-10);
        }
    }

    #[test]
    fn report_rate_and_json() {
        let e = Ensemble::single(bell()).unwrap();
        let r = simulate_dilution(&e, 2, ScissorsVariant::WeylTeleport)
            .unwrap()
            .with_block_length(4)
            .unwrap();
        assert!((r.rate_nats - 2f64.ln() / 4.0).abs() < 1e-15);
        let j = r.to_json();
        assert_eq!(j["variant"], "weyl-teleport");
        assert_eq!(j["m_rank"], 2);
    }
}
