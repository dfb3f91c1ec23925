//! Ensembles, cq-extensions, entanglement of formation and the finite-n
//! cost proxy.

pub mod cost;
pub mod ensemble;
pub mod eof;
pub mod optimizer;
pub mod wootters;

pub use cost::{cost_proxy_minimize, CostSource};
pub use ensemble::{
    conditional_entropy_cq, ensemble_from_isometry, eof_objective, isometry_from_ensemble,
    CqExtension, Ensemble,
};
pub use eof::{
    eof_minimize, eof_minimize_from, eof_regularized_estimate, EntanglementReport, EofOptions,
    RegularizedPoint,
};
pub use optimizer::SearchOptions;
pub use wootters::{concurrence_two_qubit, eof_from_concurrence, eof_two_qubit};
