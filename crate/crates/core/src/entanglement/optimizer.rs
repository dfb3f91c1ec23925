//! Derivative-free search over ensemble decompositions.
//!
//! Every decomposition of `ρ` into `K` members is `sqrt(p_i)|φ_i> =
//! Σ_j U_ij sqrt(λ_j)|e_j>` for a `K×K` unitary `U`. The search keeps the
//! unnormalized member vectors and applies two-parameter rotations to member
//! pairs, alternating a real rotation with a complex one; together they
//! generate `SU(2)` on each pair.

use rayon::prelude::*;

use super::ensemble::{member_vectors, purification_basis, reduced_spectrum};
use crate::qcore::matrix::{ComplexMatrix, C64};
use crate::qcore::random::{derive_seed, haar_unitary, rng_from_seed};
use crate::qcore::state::BipartiteSplit;
use crate::qcore::linalg::Eigen;

/// Objective that decomposes over members.
pub trait MemberObjective: Sync {
    type Summary: Clone + Send + Sync;

    /// Summary of one unnormalized member vector.
    fn summarize(&self, v: &[C64]) -> Self::Summary;

    fn combine(&self, summaries: &[Self::Summary]) -> f64;
}

/// `Σ_i p_i S(Tr_B |φ_i><φ_i|)`, the average entanglement entropy.
pub struct AverageEntropy {
    pub split: BipartiteSplit,
}

impl MemberObjective for AverageEntropy {
    type Summary = f64;

    fn summarize(&self, v: &[C64]) -> f64 {
        unnormalized_entropy(&reduced_spectrum(v, self.split))
    }

    fn combine(&self, summaries: &[f64]) -> f64 {
        summaries.iter().sum()
    }
}

/// `w S(μ / w)` for a spectrum `μ` of total weight `w`.
pub(crate) fn unnormalized_entropy(mu: &[f64]) -> f64 {
    let w: f64 = mu.iter().filter(|&&m| m > 0.0).sum();
    if w <= 0.0 {
        return 0.0;
    }
    mu.iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| -m * (m / w).ln())
        .sum::<f64>()
        .max(0.0)
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
    /// A restart stops once a full sweep improves the objective by less.
    pub tolerance: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            seed: 0,
            max_sweeps: 500,
            tolerance: 1e-9,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub value: f64,
    pub members: Vec<Vec<C64>>,
    pub converged: bool,
    pub restart: usize,
    pub sweeps: usize,
}

#[derive(Clone, Copy)]
enum Rotation {
    Real,
    Complex,
}

fn rotate(vk: &[C64], vl: &[C64], theta: f64, kind: Rotation) -> (Vec<C64>, Vec<C64>) {
    let (s, c) = theta.sin_cos();
    match kind {
        Rotation::Real => (
            vk.iter().zip(vl).map(|(a, b)| a * c - b * s).collect(),
            vk.iter().zip(vl).map(|(a, b)| a * s + b * c).collect(),
        ),
        Rotation::Complex => {
            let is = C64::new(0.0, s);
            (
                vk.iter().zip(vl).map(|(a, b)| a * c + b * is).collect(),
                vk.iter().zip(vl).map(|(a, b)| a * is + b * c).collect(),
            )
        }
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const COARSE: usize = 16;
const THETA_TOL: f64 = 1e-7;

/// Minimizes `phi` on `[0, π)`: coarse grid, then golden-section refinement
/// around the best grid point. Returns `(θ, φ(θ))`.
fn line_search(phi: impl Fn(f64) -> f64) -> (f64, f64) {
    let h = std::f64::consts::PI / COARSE as f64;
    let (mut best_t, mut best_v) = (0.0, phi(0.0));
    for j in 1..COARSE {
        let t = j as f64 * h;
        let v = phi(t);
        if v < best_v {
            best_t = t;
            best_v = v;
        }
    }
    let (mut a, mut b) = (best_t - h, best_t + h);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = phi(x1);
    let mut f2 = phi(x2);
    while b - a > THETA_TOL {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = phi(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = phi(x2);
        }
    }
    for (t, v) in [(x1, f1), (x2, f2)] {
        if v < best_v {
            best_t = t;
            best_v = v;
        }
    }
    (best_t, best_v)
}

/// Coordinate descent from one starting decomposition.
pub fn local_search<O: MemberObjective>(
    objective: &O,
    mut members: Vec<Vec<C64>>,
    max_sweeps: usize,
    tolerance: f64,
) -> SearchResult {
    let k = members.len();
    let mut summaries: Vec<O::Summary> = members.iter().map(|v| objective.summarize(v)).collect();
    let mut value = objective.combine(&summaries);
    let mut converged = k < 2;
    let mut sweeps = 0;
    while !converged && sweeps < max_sweeps {
        sweeps += 1;
        let start = value;
        for kind in [Rotation::Real, Rotation::Complex] {
            for a in 0..k {
                for b in a + 1..k {
                    let mut trial = summaries.clone();
                    let phi = |t: f64| {
                        let (va, vb) = rotate(&members[a], &members[b], t, kind);
                        let mut s = trial.clone();
                        s[a] = objective.summarize(&va);
                        s[b] = objective.summarize(&vb);
                        objective.combine(&s)
                    };
                    let (t, v) = line_search(phi);
                    if v < value && t != 0.0 {
                        let (va, vb) = rotate(&members[a], &members[b], t, kind);
                        trial[a] = objective.summarize(&va);
                        trial[b] = objective.summarize(&vb);
                        members[a] = va;
                        members[b] = vb;
                        summaries = trial;
                        value = v;
                    }
                }
            }
        }
        converged = start - value < tolerance;
    }
    SearchResult {
        value,
        members,
        converged,
        restart: 0,
        sweeps,
    }
}

/// Runs `restarts` independent searches and keeps the best (lowest index on
/// ties). Restart 0 starts from `initial` (the eigen-ensemble when `None`),
/// the others from Haar-random unitaries seeded by restart index.
pub fn search_decompositions<O: MemberObjective>(
    objective: &O,
    eig: &Eigen,
    rank: usize,
    member_count: usize,
    initial: Option<&ComplexMatrix>,
    options: &SearchOptions,
) -> SearchResult {
    let basis = purification_basis(eig, rank);
    let restarts = options.restarts.max(1);
    let results: Vec<SearchResult> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let unitary = if r == 0 {
                initial
                    .cloned()
                    .unwrap_or_else(|| ComplexMatrix::identity(member_count))
            } else {
                let mut rng = rng_from_seed(derive_seed(options.seed, r as u64));
                haar_unitary(&mut rng, member_count)
            };
            let members = member_vectors(&unitary, &basis);
            let mut res = local_search(objective, members, options.max_sweeps, options.tolerance);
            res.restart = r;
            res
        })
        .collect();
    results
        .into_iter()
        .reduce(|best, r| if r.value < best.value { r } else { best })
        .expect("at least one restart")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_search_finds_interior_minimum() {
        let (t, v) = line_search(|t| (t - 1.234).powi(2));
        assert!((t - 1.234).abs() < 1e-6);
        assert!(v < 1e-12);
    }

    #[test]
    fn rotations_preserve_pair_norm() {
        let a = vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.5)];
        let b = vec![C64::new(0.0, 0.7), C64::new(0.4, 0.0)];
        let n0: f64 = a.iter().chain(&b).map(|z| z.norm_sqr()).sum();
        for kind in [Rotation::Real, Rotation::Complex] {
            let (x, y) = rotate(&a, &b, 0.77, kind);
            let n1: f64 = x.iter().chain(&y).map(|z| z.norm_sqr()).sum();
            assert!((n0 - n1).abs() < 1e-14);
        }
    }

    #[test]
    fn unnormalized_entropy_scales() {
        assert!((unnormalized_entropy(&[0.25, 0.25]) - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert_eq!(unnormalized_entropy(&[0.0, 0.0]), 0.0);
    }
}
