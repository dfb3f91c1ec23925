//! Spectra of tensor powers grouped by type class.

use crate::error::{Error, Result};

/// Relative tolerance for merging equal base eigenvalues.
pub const MERGE_TOL: f64 = 1e-12;

/// Upper limit on the number of type classes enumerated in one call.
pub const MAX_TYPES: usize = 5_000_000;

/// Spectrum of `ρ^{⊗n}` as distinct products with multiplicities, sorted by
/// value, largest first.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeClassSpectrum {
    pub distinct_values: Vec<f64>,
    /// Natural logarithms of `distinct_values` (`-inf` for zero).
    pub log_values: Vec<f64>,
    pub multiplicities: Vec<u128>,
}

impl TypeClassSpectrum {
    pub fn len(&self) -> usize {
        self.distinct_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distinct_values.is_empty()
    }

    /// `Σ multiplicity`, or `None` on overflow.
    pub fn total_multiplicity(&self) -> Option<u128> {
        self.multiplicities
            .iter()
            .try_fold(0u128, |acc, &m| acc.checked_add(m))
    }

    /// `Σ multiplicity · value`.
    pub fn total_mass(&self) -> f64 {
        self.log_values
            .iter()
            .zip(&self.multiplicities)
            .map(|(&l, &m)| weighted(l, m))
            .sum()
    }

    /// Sum of the `m` largest eigenvalues, counted with multiplicity.
    pub fn top_mass(&self, m: u128) -> f64 {
        let mut left = m;
        let mut acc = 0.0;
        for (&l, &mult) in self.log_values.iter().zip(&self.multiplicities) {
            if left == 0 {
                break;
            }
            let take = mult.min(left);
            acc += weighted(l, take);
            left -= take;
        }
        acc
    }

    /// Spectrum of the tensor product of two such spectra.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut entries = Vec::with_capacity(self.len() * other.len());
        for (&la, &ma) in self.log_values.iter().zip(&self.multiplicities) {
            for (&lb, &mb) in other.log_values.iter().zip(&other.multiplicities) {
                let m = ma.checked_mul(mb).ok_or_else(overflow)?;
                entries.push((la + lb, m));
            }
        }
        Ok(Self::from_entries(entries))
    }

    fn from_entries(mut entries: Vec<(f64, u128)>) -> Self {
        entries.sort_by(|a, b| b.0.total_cmp(&a.0));
        Self {
            distinct_values: entries.iter().map(|e| e.0.exp()).collect(),
            log_values: entries.iter().map(|e| e.0).collect(),
            multiplicities: entries.iter().map(|e| e.1).collect(),
        }
    }
}

/// `mult · e^{log_value}` evaluated in log space.
pub(crate) fn weighted(log_value: f64, mult: u128) -> f64 {
    if mult == 0 || log_value == f64::NEG_INFINITY {
        0.0
    } else {
        (log_value + (mult as f64).ln()).exp()
    }
}

fn overflow() -> Error {
    Error::InvalidParameter("type-class multiplicity overflows u128".into())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= MERGE_TOL * a.abs().max(b.abs())
}

/// Groups equal entries of `values` (relative tolerance [`MERGE_TOL`]);
/// returns representative values and counts, in first-seen order.
pub(crate) fn merge_values(values: &[f64]) -> (Vec<f64>, Vec<u64>) {
    let mut reps: Vec<f64> = Vec::new();
    let mut counts: Vec<u64> = Vec::new();
    for &v in values {
        match reps.iter().position(|&r| close(r, v)) {
            Some(k) => counts[k] += 1,
            None => {
                reps.push(v);
                counts.push(1);
            }
        }
    }
    (reps, counts)
}

/// Binomial coefficient with overflow detection.
pub(crate) fn binomial(n: u64, k: u64) -> Option<u128> {
    let k = k.min(n - k.min(n));
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(r)
}

/// Number of compositions of `n` into `k` non-negative parts, `C(n+k-1, k-1)`.
pub fn type_count(n: usize, k: usize) -> Option<u128> {
    if k == 0 {
        return Some(0);
    }
    binomial((n + k - 1) as u64, (k - 1) as u64)
}

/// Calls `visit(counts, multiplicity)` for every type `counts` (a composition
/// of `n` into `weights.len()` parts); the multiplicity is the multinomial
/// coefficient times `Π weights_j^{counts_j}`.
pub(crate) fn for_each_type(
    weights: &[u64],
    n: usize,
    mut visit: impl FnMut(&[usize], u128),
) -> Result<()> {
    let k = weights.len();
    if k == 0 {
        return Err(Error::InvalidParameter("empty spectrum".into()));
    }
    let count = type_count(n, k).ok_or_else(overflow)?;
    if count > MAX_TYPES as u128 {
        return Err(Error::DimensionCap {
            dim: usize::try_from(count).unwrap_or(usize::MAX),
            cap: MAX_TYPES,
        });
    }
    let mut counts = vec![0usize; k];
    counts[k - 1] = n;
    loop {
        let mut mult: u128 = 1;
        let mut left = n as u64;
        for (&c, &w) in counts.iter().zip(weights) {
            let c64 = c as u64;
            mult = mult
                .checked_mul(binomial(left, c64).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
            if w != 1 {
                let p = (w as u128).checked_pow(c as u32).ok_or_else(overflow)?;
                mult = mult.checked_mul(p).ok_or_else(overflow)?;
            }
            left -= c64;
        }
        visit(&counts, mult);
        if !advance(&mut counts) {
            break;
        }
    }
    Ok(())
}

/// Steps to the next composition; false after the last one.
fn advance(counts: &mut [usize]) -> bool {
    let k = counts.len();
    if k == 1 {
        return false;
    }
    let last = counts[k - 1];
    if last > 0 {
        counts[k - 2] += 1;
        counts[k - 1] = last - 1;
        return true;
    }
    // Find the rightmost non-zero part before the last, carry it leftwards.
    let Some(j) = (0..k - 1).rev().find(|&j| counts[j] > 0) else {
        return false;
    };
    if j == 0 {
        return false;
    }
    let moved = counts[j];
    counts[j] = 0;
    counts[j - 1] += 1;
    counts[k - 1] = moved - 1;
    true
}

fn check_probability_vector(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("empty eigenvalue list".into()));
    }
    if values.iter().any(|v| !v.is_finite() || *v < -1e-12) {
        return Err(Error::InvalidParameter(
            "eigenvalues must be finite and non-negative".into(),
        ));
    }
    let total: f64 = values.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "eigenvalues sum to {total}, expected 1"
        )));
    }
    Ok(())
}

fn safe_ln(x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else {
        x.ln()
    }
}

/// Spectrum of `ρ^{⊗n}` from the spectrum of `ρ`.
pub fn iid_spectrum(eigenvalues: &[f64], n: usize) -> Result<TypeClassSpectrum> {
    check_probability_vector(eigenvalues)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let (reps, counts) = merge_values(eigenvalues);
    let logs: Vec<f64> = reps.iter().map(|&v| safe_ln(v.max(0.0))).collect();
    let mut entries = Vec::new();
    for_each_type(&counts, n, |m, mult| {
        let l = m
            .iter()
            .zip(&logs)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, &l)| c as f64 * l)
            .sum::<f64>();
        entries.push((l, mult));
    })?;
    Ok(TypeClassSpectrum::from_entries(entries))
}

/// One class of member sequences in the n-fold product of an ensemble.
#[derive(Clone, Debug)]
pub struct MemberTypeClass {
    /// How often each member occurs in the sequence.
    pub counts: Vec<usize>,
    /// Number of sequences in the class.
    pub sequences: u128,
    /// `ln Π p_i^{counts_i}`, the log-probability of each sequence.
    pub log_probability: f64,
    /// Spectrum shared by every sequence in the class.
    pub spectrum: TypeClassSpectrum,
}

/// Groups the `K^n` member sequences of an n-fold product ensemble by member
/// counts; `spectra[i]` is the reduced spectrum of member `i`. Classes with a
/// zero-probability member are skipped.
pub fn member_type_classes(
    probabilities: &[f64],
    spectra: &[Vec<f64>],
    n: usize,
) -> Result<Vec<MemberTypeClass>> {
    if probabilities.len() != spectra.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities for {} spectra",
            probabilities.len(),
            spectra.len()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let normalized: Vec<Vec<f64>> = spectra
        .iter()
        .map(|s| {
            let total: f64 = s.iter().map(|x| x.max(0.0)).sum();
            s.iter().map(|x| x.max(0.0) / total).collect()
        })
        .collect();
    let mut types = Vec::new();
    for_each_type(&vec![1; probabilities.len()], n, |c, mult| {
        types.push((c.to_vec(), mult))
    })?;
    let mut out = Vec::with_capacity(types.len());
    for (counts, sequences) in types {
        if counts
            .iter()
            .zip(probabilities)
            .any(|(&c, &p)| c > 0 && p <= 0.0)
        {
            continue;
        }
        let log_probability = counts
            .iter()
            .zip(probabilities)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, &p)| c as f64 * p.ln())
            .sum();
        let mut spectrum: Option<TypeClassSpectrum> = None;
        for (&c, s) in counts.iter().zip(&normalized) {
            if c == 0 {
                continue;
            }
            let part = iid_spectrum(s, c)?;
            spectrum = Some(match spectrum {
                None => part,
                Some(acc) => acc.tensor(&part)?,
            });
        }
        out.push(MemberTypeClass {
            counts,
            sequences,
            log_probability,
            spectrum: spectrum.expect("n >= 1"),
        });
    }
    Ok(out)
}

/// A weighted family of points `(log_ratio, rho_mass, omega_mass)` from which
/// `Tr[{Π(γ) >= 0} Π(γ)]` is answered by prefix sums: an eigenvalue pair
/// `(a, b)` of a commuting `(ρ, ω)` contributes `a − e^{nγ} b` when
/// `ln a − ln b >= nγ`.
#[derive(Clone, Debug)]
pub struct RatioProfile {
    log_ratios: Vec<f64>,
    prefix_rho: Vec<f64>,
    prefix_omega: Vec<f64>,
}

impl RatioProfile {
    /// Entries `(ln a, ln b, multiplicity)`; zero-weight entries are dropped.
    pub fn new(mut entries: Vec<(f64, f64, f64)>) -> Self {
        entries.retain(|e| e.2 > 0.0 && !(e.0 == f64::NEG_INFINITY && e.1 == f64::NEG_INFINITY));
        let mut points: Vec<(f64, f64, f64)> = entries
            .into_iter()
            .map(|(la, lb, w)| {
                let ratio = if lb == f64::NEG_INFINITY {
                    f64::INFINITY
                } else if la == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    la - lb
                };
                let lw = w.ln();
                let a = if la == f64::NEG_INFINITY { 0.0 } else { (la + lw).exp() };
                let b = if lb == f64::NEG_INFINITY { 0.0 } else { (lb + lw).exp() };
                (ratio, a, b)
            })
            .collect();
        points.sort_by(|x, y| y.0.total_cmp(&x.0));
        let mut prefix_rho = Vec::with_capacity(points.len() + 1);
        let mut prefix_omega = Vec::with_capacity(points.len() + 1);
        prefix_rho.push(0.0);
        prefix_omega.push(0.0);
        for p in &points {
            prefix_rho.push(prefix_rho.last().unwrap() + p.1);
            prefix_omega.push(prefix_omega.last().unwrap() + p.2);
        }
        Self {
            log_ratios: points.iter().map(|p| p.0).collect(),
            prefix_rho,
            prefix_omega,
        }
    }

    pub fn len(&self) -> usize {
        self.log_ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_ratios.is_empty()
    }

    /// `Σ_{ratio >= threshold} (a − e^{threshold} b)`.
    pub fn positive_part(&self, threshold: f64) -> f64 {
        let k = self.log_ratios.partition_point(|&r| r >= threshold);
        let rho = self.prefix_rho[k];
        let omega = self.prefix_omega[k];
        if omega == 0.0 {
            return rho.max(0.0);
        }
        (rho - threshold.exp() * omega).max(0.0)
    }
}

/// Profile of a commuting pair `(ρ^{⊗n}, ω^{⊗n})` given the joint spectrum
/// `(a_j, b_j)` of `(ρ, ω)` in a common eigenbasis.
pub fn iid_ratio_profile(joint: &[(f64, f64)], n: usize) -> Result<RatioProfile> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let mut reps: Vec<(f64, f64)> = Vec::new();
    let mut counts: Vec<u64> = Vec::new();
    for &(a, b) in joint {
        match reps.iter().position(|r| close(r.0, a) && close(r.1, b)) {
            Some(k) => counts[k] += 1,
            None => {
                reps.push((a, b));
                counts.push(1);
            }
        }
    }
    let logs: Vec<(f64, f64)> = reps
        .iter()
        .map(|&(a, b)| (safe_ln(a), safe_ln(b)))
        .collect();
    let mut entries = Vec::new();
    for_each_type(&counts, n, |m, mult| {
        let mut la = 0.0;
        let mut lb = 0.0;
        for (&c, &(x, y)) in m.iter().zip(&logs) {
            if c > 0 {
                la += c as f64 * x;
                lb += c as f64 * y;
            }
        }
        entries.push((la, lb, mult as f64));
    })?;
    Ok(RatioProfile::new(entries))
}
