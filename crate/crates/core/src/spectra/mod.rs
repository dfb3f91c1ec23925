//! Spectral projections `{A >= B}`, the two projection lemmas as executable
//! checks, and finite-n sweeps of `Tr[{Π(γ) >= 0} Π(γ)]`.

pub mod projector;
pub mod sweep;
pub mod types;

pub use projector::{
    lemma1_gap, lemma2_check, pi_trace, positive_part_projector, positive_part_trace,
    spectral_compare, SpectralProjector,
};
pub use sweep::{
    cq_conditional_pi_trace, default_gamma_grid, gamma_grid, gamma_sweep, joint_spectrum,
    rate_estimate, CqLevel, GammaSweep, RateEstimate, SweepMode, SweepSource,
};
pub use types::{iid_spectrum, type_count, TypeClassSpectrum};
