use rayon::prelude::*;
use serde::Serialize;

use super::projector::pi_trace_operators;
use super::types::{iid_ratio_profile, member_type_classes, RatioProfile};
use crate::entanglement::{ensemble::reduced_spectrum, CqExtension};
use crate::error::{Error, Result};
use crate::qcore::io::format_f64;
use crate::qcore::linalg::{eigenvalues_unchecked, hermitian_eig};
use crate::qcore::matrix::{tensor_product, ComplexMatrix};
use crate::qcore::state::{reduced_a_of_vector, DensityMatrix};

/// Largest ambient dimension for explicit tensor-power assembly.
pub const EXPLICIT_DIM_CAP: usize = 4096;

/// Commutation and joint-diagonality tolerance for the type-class path.
pub const COMMUTE_TOL: f64 = 1e-10;

/// Which γ axis a sweep reports on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// `f_n(γ)` for `Π = ρ − e^{nγ} ω`; non-increasing in γ.
    Divergence,
    /// Conditional-entropy axis `γ_S = −γ_D`; non-decreasing in γ.
    ConditionalEntropy,
}

/// A sequence of state pairs.
#[derive(Clone, Debug)]
pub enum SweepSource {
    /// `(n, ρ_n, ω_n)` given explicitly per level.
    Explicit(Vec<(usize, DensityMatrix, ComplexMatrix)>),
    /// `(ρ^{⊗n}, ω^{⊗n})`.
    Iid { rho: DensityMatrix, omega: ComplexMatrix },
    /// `(ρ_RA^n, ρ_R^n ⊗ I_A)` of an explicit cq-extension per level.
    ExplicitCq(Vec<(usize, CqExtension)>),
    /// The n-fold product of a base cq-extension.
    IidCq(CqExtension),
}

#[derive(Clone, Debug)]
enum Level {
    Profile(RatioProfile),
    Matrices(ComplexMatrix, ComplexMatrix),
}

impl Level {
    fn divergence_value(&self, n: usize, gamma: f64) -> Result<f64> {
        match self {
            Level::Profile(p) => Ok(p.positive_part(n as f64 * gamma)),
            Level::Matrices(rho, omega) => pi_trace_operators(rho, omega, n, gamma),
        }
    }
}

/// `f_n(γ)` on a grid for several n.
#[derive(Clone, Debug, Serialize)]
pub struct GammaSweep {
    pub gamma_grid: Vec<f64>,
    pub n_values: Vec<usize>,
    /// `f_values[k][j]` belongs to `n_values[k]` and `gamma_grid[j]`.
    pub f_values: Vec<Vec<f64>>,
    pub mode: SweepMode,
}

impl GammaSweep {
    /// CSV with columns `n,gamma_nats,f_value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,gamma_nats,f_value\n");
        for (n, row) in self.n_values.iter().zip(&self.f_values) {
            for (g, f) in self.gamma_grid.iter().zip(row) {
                out.push_str(&format!("{n},{},{}\n", format_f64(*g), format_f64(*f)));
            }
        }
        out
    }
}

/// Finite-n crossing estimates from one row of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateEstimate {
    pub n: usize,
    pub gamma_low: f64,
    pub gamma_high: f64,
    pub midpoint: f64,
    pub epsilon: f64,
    /// The lower threshold was never reached; `gamma_low` is the grid start.
    pub open_low: bool,
    /// The upper threshold was never reached; `gamma_high` is the grid end.
    pub open_high: bool,
}

/// Uniform grid `min, min+step, ...` up to `max` (inclusive within 1e-9 of a
/// step).
pub fn gamma_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && step.is_finite()) || step <= 0.0 || max < min {
        return Err(Error::InvalidParameter(format!(
            "bad gamma grid [{min}, {max}] step {step}"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    if count > 10_000_000 {
        return Err(Error::InvalidParameter("gamma grid too fine".into()));
    }
    Ok((0..count).map(|k| min + k as f64 * step).collect())
}

/// `[−2, 2]` nats in steps of 0.01.
pub fn default_gamma_grid() -> Vec<f64> {
    gamma_grid(-2.0, 2.0, 0.01).expect("static grid")
}

/// Joint spectrum `(a_j, b_j)` of a commuting pair, or `None` when the pair
/// does not commute (or is not simultaneously diagonalized at tolerance).
pub fn joint_spectrum(rho: &ComplexMatrix, omega: &ComplexMatrix) -> Result<Option<Vec<(f64, f64)>>> {
    let commutator = &(rho * omega) - &(omega * rho);
    if commutator.max_abs() > COMMUTE_TOL {
        return Ok(None);
    }
    // A generic combination separates the joint eigenspaces.
    let mix = rho + &omega.scale(std::f64::consts::PI);
    let eig = hermitian_eig(&mix)?;
    let v = &eig.vectors;
    let vd = v.adjoint();
    let a = &(&vd * rho) * v;
    let b = &(&vd * omega) * v;
    let d = a.rows();
    for i in 0..d {
        for j in 0..d {
            if i != j && (a.get(i, j).norm() > COMMUTE_TOL || b.get(i, j).norm() > COMMUTE_TOL) {
                return Ok(None);
            }
        }
    }
    Ok(Some((0..d).map(|i| (a.get(i, i).re, b.get(i, i).re)).collect()))
}

fn explicit_power(m: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let dim = (m.rows() as u128).checked_pow(n as u32);
    match dim {
        Some(d) if d <= EXPLICIT_DIM_CAP as u128 => {}
        _ => {
            return Err(Error::DimensionCap {
                dim: dim.map_or(usize::MAX, |d| usize::try_from(d).unwrap_or(usize::MAX)),
                cap: EXPLICIT_DIM_CAP,
            })
        }
    }
    let mut out = m.clone();
    for _ in 1..n {
        out = tensor_product(&out, m);
    }
    Ok(out)
}

/// Blockwise profile of `(ρ_RA, ρ_R ⊗ I_A)` for an explicit cq-extension.
fn cq_profile(cq: &CqExtension) -> RatioProfile {
    let split = cq.ensemble().split();
    let entries = cq
        .ensemble()
        .iter()
        .filter(|(p, _)| *p > 0.0)
        .flat_map(|(p, m)| {
            let lp = p.ln();
            reduced_spectrum(m.amplitudes(), split)
                .into_iter()
                .filter(|&l| l > 0.0)
                .map(move |l| (l.ln() + lp, lp, 1.0))
        })
        .collect();
    RatioProfile::new(entries)
}

/// Profile of the n-fold product of a cq-extension, grouping member
/// sequences by how often each member occurs.
fn iid_cq_profile(cq: &CqExtension, n: usize) -> Result<RatioProfile> {
    let ensemble = cq.ensemble();
    let classes = member_type_classes(ensemble.probabilities(), &ensemble.reduced_spectra(), n)?;
    let mut entries = Vec::new();
    for class in classes {
        let lp = class.log_probability;
        let spectrum = &class.spectrum;
        for (&l, &m) in spectrum.log_values.iter().zip(&spectrum.multiplicities) {
            if l == f64::NEG_INFINITY {
                continue;
            }
            entries.push((l + lp, lp, class.sequences as f64 * m as f64));
        }
    }
    Ok(RatioProfile::new(entries))
}

fn prepare(source: &SweepSource, n: usize) -> Result<Level> {
    match source {
        SweepSource::Explicit(levels) => {
            let (_, rho, omega) = levels
                .iter()
                .find(|(m, _, _)| *m == n)
                .ok_or_else(|| Error::InvalidParameter(format!("no explicit state for n={n}")))?;
            if rho.dim() != omega.rows() || !omega.is_square() {
                return Err(Error::DimensionMismatch(format!(
                    "state of dimension {} against {}x{} reference",
                    rho.dim(),
                    omega.rows(),
                    omega.cols()
                )));
            }
            Ok(Level::Matrices(rho.matrix().clone(), omega.clone()))
        }
        SweepSource::Iid { rho, omega } => {
            if rho.dim() != omega.rows() || !omega.is_square() {
                return Err(Error::DimensionMismatch(format!(
                    "state of dimension {} against {}x{} reference",
                    rho.dim(),
                    omega.rows(),
                    omega.cols()
                )));
            }
            match joint_spectrum(rho.matrix(), omega)? {
                Some(joint) => Ok(Level::Profile(iid_ratio_profile(&joint, n)?)),
                None => Ok(Level::Matrices(
                    explicit_power(rho.matrix(), n)?,
                    explicit_power(omega, n)?,
                )),
            }
        }
        SweepSource::ExplicitCq(levels) => {
            let (_, cq) = levels
                .iter()
                .find(|(m, _)| *m == n)
                .ok_or_else(|| Error::InvalidParameter(format!("no cq-extension for n={n}")))?;
            Ok(Level::Profile(cq_profile(cq)))
        }
        SweepSource::IidCq(cq) => Ok(Level::Profile(iid_cq_profile(cq, n)?)),
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty gamma grid".into()));
    }
    if grid.iter().any(|g| !g.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "gamma grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Evaluates `f_n(γ) = Tr[{Π^n(γ) >= 0} Π^n(γ)]` for every `n` and grid
/// point. In conditional mode the grid is read on the conditional-entropy
/// axis, `γ_D = −γ`.
pub fn gamma_sweep(
    source: &SweepSource,
    n_values: &[usize],
    gamma_grid: &[f64],
    mode: SweepMode,
) -> Result<GammaSweep> {
    validate_grid(gamma_grid)?;
    if n_values.is_empty() || n_values.contains(&0) {
        return Err(Error::InvalidParameter("n values must be non-empty and >= 1".into()));
    }
    let sign = match mode {
        SweepMode::Divergence => 1.0,
        SweepMode::ConditionalEntropy => -1.0,
    };
    let f_values = n_values
        .iter()
        .map(|&n| {
            let level = prepare(source, n)?;
            gamma_grid
                .par_iter()
                .map(|&g| level.divergence_value(n, sign * g))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GammaSweep {
        gamma_grid: gamma_grid.to_vec(),
        n_values: n_values.to_vec(),
        f_values,
        mode,
    })
}

/// Threshold crossings of each sweep row at `ε`, `1/2` and `1 − ε`.
///
/// On the divergence axis `gamma_low` is the largest grid point with
/// `f >= 1 − ε` and `gamma_high` the smallest with `f <= ε`; on the
/// conditional axis the roles of the thresholds swap so that
/// `gamma_low <= midpoint <= gamma_high` either way.
pub fn rate_estimate(sweep: &GammaSweep, epsilon: f64) -> Result<Vec<RateEstimate>> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} outside (0, 1/2)"
        )));
    }
    let grid = &sweep.gamma_grid;
    Ok(sweep
        .n_values
        .iter()
        .zip(&sweep.f_values)
        .map(|(&n, row)| {
            // g is non-increasing in γ for both modes.
            let g: Vec<f64> = match sweep.mode {
                SweepMode::Divergence => row.clone(),
                SweepMode::ConditionalEntropy => row.iter().map(|f| 1.0 - f).collect(),
            };
            row_estimate(n, grid, &g, epsilon)
        })
        .collect())
}

fn row_estimate(n: usize, grid: &[f64], g: &[f64], epsilon: f64) -> RateEstimate {
    let low = g.iter().rposition(|&v| v >= 1.0 - epsilon);
    let high = g.iter().position(|&v| v <= epsilon);
    let midpoint = match g.iter().position(|&v| v <= 0.5) {
        Some(0) => grid[0],
        Some(k) => {
            let (g0, g1) = (g[k - 1], g[k]);
            let t = if g0 > g1 { (g0 - 0.5) / (g0 - g1) } else { 0.0 };
            grid[k - 1] + t * (grid[k] - grid[k - 1])
        }
        None => grid[grid.len() - 1],
    };
    RateEstimate {
        n,
        gamma_low: low.map_or(grid[0], |k| grid[k]),
        gamma_high: high.map_or(grid[grid.len() - 1], |k| grid[k]),
        midpoint,
        epsilon,
        open_low: low.is_none(),
        open_high: high.is_none(),
    }
}

/// `Tr[{Π >= 0} Π]` for `Π = ρ_RA − e^{nγ} ρ_R ⊗ I_A`, evaluated block by
/// block over the flags (`γ` on the divergence axis).
pub fn cq_conditional_pi_trace(cq: &CqExtension, gamma: f64, n: usize) -> f64 {
    let split = cq.ensemble().split();
    let t = (n as f64 * gamma).exp();
    cq.ensemble()
        .iter()
        .map(|(p, m)| {
            let red = reduced_a_of_vector(m.amplitudes(), split);
            let block: f64 = eigenvalues_unchecked(&red)
                .into_iter()
                .map(|l| (l - t).max(0.0))
                .sum();
            p * block
        })
        .sum()
}

/// Prepared i.i.d. cq profile for repeated evaluation at one `n`.
pub struct CqLevel {
    n: usize,
    profile: RatioProfile,
}

impl CqLevel {
    pub fn iid(base: &CqExtension, n: usize) -> Result<Self> {
        Ok(Self {
            n,
            profile: iid_cq_profile(base, n)?,
        })
    }

    pub fn explicit(cq: &CqExtension, n: usize) -> Self {
        Self {
            n,
            profile: cq_profile(cq),
        }
    }

    pub(crate) fn from_profile(n: usize, profile: RatioProfile) -> Self {
        Self { n, profile }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `f_n(γ_S)` on the conditional-entropy axis.
    pub fn conditional_value(&self, gamma_s: f64) -> f64 {
        self.profile.positive_part(-(self.n as f64) * gamma_s)
    }

    /// The half crossing on `grid`, interpolated as in [`rate_estimate`].
    /// Uses bisection, relying on `f_n` being non-decreasing on this axis.
    pub fn midpoint(&self, grid: &[f64]) -> f64 {
        let k = grid.partition_point(|&g| self.conditional_value(g) < 0.5);
        if k == 0 {
            return grid[0];
        }
        if k == grid.len() {
            return grid[k - 1];
        }
        let g0 = 1.0 - self.conditional_value(grid[k - 1]);
        let g1 = 1.0 - self.conditional_value(grid[k]);
        let t = if g0 > g1 { (g0 - 0.5) / (g0 - g1) } else { 0.0 };
        grid[k - 1] + t * (grid[k] - grid[k - 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::Ensemble;
    use crate::qcore::state::{BipartiteSplit, PureState};
    use crate::qcore::matrix::C64;

    fn qubit_pair() -> SweepSource {
        SweepSource::Iid {
            rho: DensityMatrix::from_diagonal(&[0.9, 0.1]).unwrap(),
            omega: ComplexMatrix::identity(2).scale(0.5),
        }
    }

    #[test]
    fn default_grid_shape() {
        let g = default_gamma_grid();
        assert_eq!(g.len(), 401);
        assert!((g[400] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn type_class_matches_explicit_power() {
        let rho = DensityMatrix::from_diagonal(&[0.7, 0.2, 0.1]).unwrap();
        let omega = ComplexMatrix::from_diagonal(&[0.3, 0.3, 0.4]);
        let fast = prepare(&SweepSource::Iid { rho: rho.clone(), omega: omega.clone() }, 4).unwrap();
        assert!(matches!(fast, Level::Profile(_)));
        let slow = Level::Matrices(
            explicit_power(rho.matrix(), 4).unwrap(),
            explicit_power(&omega, 4).unwrap(),
        );
        for g in [-0.5, -0.1, 0.0, 0.2, 0.7] {
            let a = fast.divergence_value(4, g).unwrap();
            let b = slow.divergence_value(4, g).unwrap();
            assert!((a - b).abs() < 1e-9, "{g}: {a} vs {b}");
        }
    }

    #[test]
    fn identical_pair_midpoint_shrinks_to_zero() {
        let rho = DensityMatrix::from_diagonal(&[0.6, 0.4]).unwrap();
        let src = SweepSource::Iid { omega: rho.matrix().clone(), rho };
        let sweep = gamma_sweep(&src, &[1, 5, 10], &default_gamma_grid(), SweepMode::Divergence).unwrap();
        // f_n(γ) = 1 − e^{nγ} below zero and 0 above, so the half crossing
        // sits at −ln 2 / n.
        for est in rate_estimate(&sweep, 0.1).unwrap() {
            let want = -(2f64.ln()) / est.n as f64;
            assert!((est.midpoint - want).abs() <= 0.01, "{est:?}");
        }
        assert!(sweep.f_values.iter().all(|row| row[200..].iter().all(|&f| f.abs() < 1e-12)));
    }

    #[test]
    fn stein_midpoint_near_relative_entropy() {
        let sweep = gamma_sweep(&qubit_pair(), &[20], &default_gamma_grid(), SweepMode::Divergence).unwrap();
        let est = &rate_estimate(&sweep, 0.1).unwrap()[0];
        let s = 2f64.ln() - 0.325_082_973_391_448_2;
        assert!((est.midpoint - s).abs() < 0.05, "{est:?}");
        assert!(est.gamma_low <= est.midpoint && est.midpoint <= est.gamma_high);
    }

    #[test]
    fn non_commuting_pair_uses_explicit_path() {
        let rho = DensityMatrix::from_diagonal(&[0.9, 0.1]).unwrap();
        let h = 0.5;
        let omega = ComplexMatrix::from_real_rows(&[&[h, 0.2], &[0.2, h]]).unwrap();
        let level = prepare(&SweepSource::Iid { rho, omega }, 2).unwrap();
        assert!(matches!(level, Level::Matrices(..)));
    }

    #[test]
    fn constant_row_flags_open_interval() {
        let sweep = GammaSweep {
            gamma_grid: vec![0.0, 0.5, 1.0],
            n_values: vec![1],
            f_values: vec![vec![1.0, 1.0, 1.0]],
            mode: SweepMode::Divergence,
        };
        let est = &rate_estimate(&sweep, 0.1).unwrap()[0];
        assert!(est.open_high && !est.open_low);
        assert_eq!(est.gamma_high, 1.0);
        assert!(rate_estimate(&sweep, 0.5).is_err());
    }

    #[test]
    fn conditional_axis_for_pure_state() {
        let split = BipartiteSplit::new(2, 2).unwrap();
        let s8 = 0.8f64.sqrt();
        let s2 = 0.2f64.sqrt();
        let zero = C64::new(0.0, 0.0);
        let psi = PureState::new(vec![C64::new(s8, 0.0), zero, zero, C64::new(s2, 0.0)], Some(split)).unwrap();
        let cq = CqExtension::new(Ensemble::single(psi).unwrap());
        let sweep = gamma_sweep(&SweepSource::IidCq(cq), &[1], &default_gamma_grid(), SweepMode::ConditionalEntropy).unwrap();
        // f_1(γ) = Σ max(0, λ − e^{−γ}) is non-decreasing.
        let row = &sweep.f_values[0];
        assert!(row.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!((row[400] - (0.8 - (-2f64).exp()).max(0.0) - (0.2 - (-2f64).exp()).max(0.0)).abs() < 1e-12);
    }

    #[test]
    fn blockwise_matches_assembled() {
        let split = BipartiteSplit::new(2, 2).unwrap();
        let bell = crate::qcore::state::maximally_entangled(2, split).unwrap();
        let prod = PureState::basis(4, 0, Some(split)).unwrap();
        let cq = CqExtension::new(Ensemble::new(vec![0.3, 0.7], vec![bell, prod]).unwrap());
        let ra = cq.assemble_ra().unwrap();
        let omega = cq.flag_marginal_times_identity();
        for g in [-1.0, -0.5, -0.1, 0.0, 0.3] {
            let a = cq_conditional_pi_trace(&cq, g, 1);
            let b = pi_trace_operators(ra.matrix(), &omega, 1, g).unwrap();
            assert!((a - b).abs() < 1e-9);
            assert!((CqLevel::explicit(&cq, 1).conditional_value(-g) - b).abs() < 1e-9);
        }
    }
}
