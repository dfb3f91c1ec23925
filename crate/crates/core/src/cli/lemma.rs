//! Random draws for the two projection lemmas.

use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::qcore::io::format_f64;
use crate::qcore::random::{
    derive_seed, random_contraction, random_hermitian, random_mixed, rng_from_seed,
};
use crate::spectra::{lemma1_gap, lemma2_check};

/// One checked draw. For the first lemma `value` is the gap and the bound
/// is zero; for the second `value = Tr[{ρ > e^{nγ}ω} ω]` and the bound is
/// `e^{−nγ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaRow {
    pub lemma: u8,
    pub draw: usize,
    pub dim: usize,
    pub n: Option<usize>,
    pub gamma: Option<f64>,
    pub value: f64,
    pub bound: f64,
}

impl LemmaRow {
    /// Signed slack; negative means the inequality failed.
    pub fn margin(&self) -> f64 {
        match self.lemma {
            1 => self.value - self.bound,
            _ => self.bound - self.value,
        }
    }
}

/// `1000`-style suites: draw `i` uses its own seed derived from `(seed, 1, i)`
/// with `d` uniform in `1..=max_dim` and `A`, `B` Gaussian Hermitian.
pub fn lemma1_draws(seed: u64, draws: usize, max_dim: usize) -> Result<Vec<LemmaRow>> {
    let base = derive_seed(seed, 1);
    (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(base, i as u64));
            let d = rng.random_range(1..=max_dim.max(1));
            let a = random_hermitian(&mut rng, d);
            let b = random_hermitian(&mut rng, d);
            let p = random_contraction(&mut rng, d);
            Ok(LemmaRow {
                lemma: 1,
                draw: i,
                dim: d,
                n: None,
                gamma: None,
                value: lemma1_gap(&a, &b, &p)?,
                bound: 0.0,
            })
        })
        .collect()
}

/// Draw `i` takes `n = n_values[i mod len]`, `γ` uniform in `[−1, 1]`, a
/// random state of random rank and a full-rank reference.
pub fn lemma2_draws(
    seed: u64,
    draws: usize,
    max_dim: usize,
    n_values: &[usize],
) -> Result<Vec<LemmaRow>> {
    let base = derive_seed(seed, 2);
    let n_values = if n_values.is_empty() { &[1][..] } else { n_values };
    (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(base, i as u64));
            let d = rng.random_range(1..=max_dim.max(1));
            let env = rng.random_range(1..=d);
            let n = n_values[i % n_values.len()];
            let gamma = rng.random_range(-1.0..=1.0);
            let rho = random_mixed(&mut rng, d, env)?;
            let omega = random_mixed(&mut rng, d, d)?;
            let (value, bound) = lemma2_check(&rho, omega.matrix(), n, gamma)?;
            Ok(LemmaRow {
                lemma: 2,
                draw: i,
                dim: d,
                n: Some(n),
                gamma: Some(gamma),
                value,
                bound,
            })
        })
        .collect()
}

pub fn lemma_csv(rows: &[LemmaRow], bits: bool) -> String {
    let unit = if bits { "bits" } else { "nats" };
    let mut s = format!("lemma,draw,dim,n,gamma_{unit},value,bound,margin\n");
    for r in rows {
        let gamma = r
            .gamma
            .map(|g| format_f64(if bits { g / std::f64::consts::LN_2 } else { g }))
            .unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.lemma,
            r.draw,
            r.dim,
            r.n.map(|n| n.to_string()).unwrap_or_default(),
            gamma,
            format_f64(r.value),
            format_f64(r.bound),
            format_f64(r.margin()),
        ));
    }
    s
}
