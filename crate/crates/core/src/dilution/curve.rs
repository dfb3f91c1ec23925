//! Rate sweeps for i.i.d. targets and the weak-converse bound.

use rayon::prelude::*;
use serde_json::{json, Value};

use super::protocol::{DilutionReport, ScissorsVariant};
use crate::entanglement::{CqExtension, Ensemble};
use crate::error::{Error, Result};
use crate::qcore::io::format_f64;
use crate::spectra::types::member_type_classes;
use crate::spectra::{cq_conditional_pi_trace, CqLevel};

/// `M = ⌈e^{nR}⌉`, saturating at `u128::MAX`. Values of `e^{nR}` within
/// `1e-9` (relative) of an integer are taken as that integer so that
/// `R = ln(M)/n` maps back to `M`.
pub fn rate_to_rank(n: usize, rate_nats: f64) -> u128 {
    let x = n as f64 * rate_nats;
    if x.is_nan() {
        return 1;
    }
    if x >= (u128::MAX as f64).ln() {
        return u128::MAX;
    }
    let e = x.exp();
    let r = e.round();
    let m = if (e - r).abs() <= 1e-9 * r.max(1.0) { r } else { e.ceil() };
    (m as u128).max(1)
}

/// `ln(M) / n`, the rate actually consumed by a rank-`M` resource.
pub fn effective_rate(n: usize, m: u128) -> f64 {
    (m as f64).ln() / n as f64
}

/// One row of a dilution table. Curve rows carry no simulated fidelity.
#[derive(Clone, Debug, PartialEq)]
pub struct DilutionRow {
    pub n: usize,
    pub rate_nats: f64,
    pub m_rank: u128,
    pub f2_sim: Option<f64>,
    pub f2_formula: f64,
    pub f2_lower: f64,
    pub f2_upper: f64,
    pub variant: Option<ScissorsVariant>,
}

impl DilutionRow {
    pub fn rate_bits(&self) -> f64 {
        self.rate_nats / std::f64::consts::LN_2
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "rate_nats": self.rate_nats,
            "rate_bits": self.rate_bits(),
            "m_rank": self.m_rank.to_string(),
            "f2_sim": self.f2_sim,
            "f2_formula": self.f2_formula,
            "f2_lower": self.f2_lower,
            "f2_upper": self.f2_upper,
            "variant": self.variant.map(|v| v.label()),
        })
    }
}

impl From<&DilutionReport> for DilutionRow {
    fn from(r: &DilutionReport) -> Self {
        Self {
            n: r.n,
            rate_nats: r.rate_nats,
            m_rank: r.m_rank as u128,
            f2_sim: Some(r.fidelity_sim * r.fidelity_sim),
            f2_formula: r.fidelity_formula * r.fidelity_formula,
            f2_lower: r.lower_bound,
            f2_upper: r.upper_bound,
            variant: Some(r.variant),
        }
    }
}

pub const DILUTION_CSV_HEADER: &str =
    "n,rate_nats,rate_bits,m_rank,f2_sim,f2_formula,f2_lower,f2_upper,variant";

pub fn rows_to_csv(rows: &[DilutionRow]) -> String {
    let mut s = String::from(DILUTION_CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.n,
            format_f64(r.rate_nats),
            format_f64(r.rate_bits()),
            r.m_rank,
            r.f2_sim.map(format_f64).unwrap_or_default(),
            format_f64(r.f2_formula),
            format_f64(r.f2_lower),
            format_f64(r.f2_upper),
            r.variant.map(|v| v.label()).unwrap_or_default(),
        ));
    }
    s
}

/// `F²(n, R)` for the n-fold product of `base`: over member sequences,
/// probability times the mass of the `⌈e^{nR}⌉` largest product Schmidt
/// coefficients. Rows are ordered by `n`, then by rate.
pub fn achievability_curve_iid(
    base: &Ensemble,
    rates_nats: &[f64],
    n_values: &[usize],
) -> Result<Vec<DilutionRow>> {
    if rates_nats.is_empty() {
        return Err(Error::InvalidParameter("rate grid is empty".into()));
    }
    if let Some(r) = rates_nats.iter().find(|r| !r.is_finite()) {
        return Err(Error::InvalidParameter(format!("rate {r} is not finite")));
    }
    if n_values.contains(&0) {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let spectra = base.reduced_spectra();
    let per_n: Vec<Vec<DilutionRow>> = n_values
        .par_iter()
        .map(|&n| {
            let classes = member_type_classes(base.probabilities(), &spectra, n)?;
            Ok(rates_nats
                .iter()
                .map(|&rate| {
                    let m = rate_to_rank(n, rate);
                    let f2: f64 = classes
                        .iter()
                        .map(|c| {
                            c.sequences as f64 * c.log_probability.exp() * c.spectrum.top_mass(m)
                        })
                        .sum::<f64>()
                        .min(1.0);
                    DilutionRow {
                        n,
                        rate_nats: rate,
                        m_rank: m,
                        f2_sim: None,
                        f2_formula: f2,
                        f2_lower: f2 * f2,
                        f2_upper: f2,
                        variant: None,
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_n.into_iter().flatten().collect())
}

/// `f_n(γ) + e^{−n(γ−R)}` with `f_n` the conditional-axis positive part of
/// `ρ_RA − e^{−nγ} ρ_R ⊗ I_A` for `cq` taken as the n-th state.
pub fn converse_bound(cq: &CqExtension, gamma: f64, rate_nats: f64, n: usize) -> f64 {
    cq_conditional_pi_trace(cq, -gamma, n) + (-(n as f64) * (gamma - rate_nats)).exp()
}

/// [`converse_bound`] on a prepared level, e.g. `CqLevel::iid` for n copies
/// of a base extension.
pub fn converse_bound_level(level: &CqLevel, gamma: f64, rate_nats: f64) -> f64 {
    level.conditional_value(gamma) + (-(level.n() as f64) * (gamma - rate_nats)).exp()
}
