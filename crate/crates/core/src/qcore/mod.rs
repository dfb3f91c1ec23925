//! Dense complex linear algebra and quantum-state primitives.

pub mod io;
pub mod linalg;
pub mod matrix;
pub mod measures;
pub mod random;
pub mod state;

pub use linalg::{hermitian_eig, hermitian_eigenvalues, Eigen, RANK_TOL};
pub use matrix::{tensor_product, ComplexMatrix, C64};
pub use measures::{
    entropy_of_spectrum, fidelity, fidelity_operators, relative_entropy, trace_distance,
    von_neumann_entropy,
};
pub use state::{
    maximally_entangled, partial_trace, partial_trace_operator, purify, schmidt_coefficients,
    schmidt_decompose, BipartiteSplit, DensityMatrix, PureState, SchmidtForm, Subsystem,
};
