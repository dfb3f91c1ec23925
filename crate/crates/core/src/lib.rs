//! Numerical toolkit for the information-spectrum description of entanglement
//! cost.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`]: dense complex matrices, density matrices, pure states, Schmidt
//!   decompositions, fidelity and entropies.
//! - [`spectra`]: spectral projections `{A >= B}`, the two projection lemmas
//!   as executable checks, and finite-n sweeps of `Tr[{Π(γ) >= 0} Π(γ)]` with
//!   rate estimates (including a type-class fast path for i.i.d. sources).
//! - [`entanglement`]: ensembles, cq-extensions, entanglement of formation
//!   (Wootters oracle plus a general Givens-sweep minimizer) and the finite-n
//!   cost proxy.
//! - [`dilution`]: exact simulation of the truncating-teleportation dilution
//!   protocol, its closed-form fidelity, the i.i.d. achievability curve and the
//!   converse bound.
//! - [`cli`]: the `entcost` command-line front end.
//!
//! All entropic quantities are in nats.

pub mod cli;
pub mod dilution;
pub mod entanglement;
pub mod error;
pub mod qcore;
pub mod spectra;

pub use error::{Error, Result};
