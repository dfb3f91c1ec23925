//! Entanglement dilution: exact protocol simulation through a rank-`M`
//! resource, the closed-form fidelity, i.i.d. achievability curves and the
//! weak-converse bound.

pub mod curve;
pub mod protocol;

pub use curve::{
    achievability_curve_iid, converse_bound, converse_bound_level, effective_rate, rate_to_rank,
    rows_to_csv, DilutionRow, DILUTION_CSV_HEADER,
};
pub use protocol::{
    dilution_fidelity_formula, dilution_output, scissors_channel, simulate_dilution,
    theta_unitary, truncation_projector, DilutionReport, ScissorsOutput, ScissorsVariant,
    TruncationProjector, SIMULATION_DIM_CAP,
};
