//! Separability and two-body Bell nonlocality of diagonal symmetric (DS)
//! N-qubit states, i.e. mixtures of Dicke projectors.
//!
//! Separability is decided through the positivity of Hankel matrices built
//! from the canonical weights `q_m = p_m / C(N, m)`; the dense `2^N`
//! constructions in [`oracle`] exist to cross-check that fast path.

pub mod bell;
pub mod cli;
pub mod ds_state;
pub mod error;
pub mod linalg;
pub mod optimize;
pub mod oracle;
pub mod sampling;
pub mod scan;
pub mod selftest;
pub mod separability;

pub use bell::{
    bell_params, classify_nonlocal, optimize_angles, peres_check, q_dicke, q_ds, BellParams,
    BellVerdict, DeviceAngles, Objective,
};
pub use ds_state::{canonical_weights, jc_state, make_ds, CanonicalWeights, DSState};
pub use error::{Error, Result};
pub use separability::{
    classify, classify_with, tri_rank, ClassificationReport, ClassifyOptions, Convention, Verdict,
};
