//! Seeded random matrices and states.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{ComplexMatrix, C64};
use super::state::{partial_trace, BipartiteSplit, DensityMatrix, PureState, Subsystem};
use crate::error::Result;

pub type StdRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> StdRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-task seed derived from a master seed and a stable task index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let entries = (0..rows * cols).map(|_| complex_normal(rng)).collect();
    ComplexMatrix::new(rows, cols, entries).expect("positive shape")
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase fixing.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim, dim).into_inner();
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let u = DMatrix::from_fn(dim, dim, |i, j| {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q[(i, j)] * phase
    });
    u.into()
}

pub fn random_pure<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    split: Option<BipartiteSplit>,
) -> Result<PureState> {
    let v = (0..dim).map(|_| complex_normal(rng)).collect();
    PureState::normalized(v, split)
}

/// Mixed state of dimension `dim` obtained by tracing a random pure state on
/// `dim x env` over the environment; rank is at most `env`.
pub fn random_mixed<R: Rng + ?Sized>(rng: &mut R, dim: usize, env: usize) -> Result<DensityMatrix> {
    let split = BipartiteSplit::new(dim, env)?;
    let psi = random_pure(rng, dim * env, Some(split))?;
    partial_trace(&DensityMatrix::from_pure(&psi), split, Subsystem::A)
}

/// Hermitian matrix with Gaussian entries (GUE up to scale).
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ginibre(rng, dim, dim).hermitian_part()
}

/// Random `0 <= P <= I`: a Haar rotation of uniform eigenvalues in `[0, 1]`.
pub fn random_contraction<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let u = haar_unitary(rng, dim);
    let d: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    (&(&u * &ComplexMatrix::from_diagonal(&d)) * &u.adjoint()).hermitian_part()
}

pub fn random_probabilities<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}
