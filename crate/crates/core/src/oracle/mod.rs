//! Brute-force backends used to check the closed forms.

pub mod dense;
pub mod kraus_enum;
pub mod montecarlo;
pub mod projectors;
pub mod suite;

pub use dense::{compose_bruteforce, cr_unitary, evolve_dense, partial_trace, CMatrix, DenseState, MAX_QUBITS};
pub use kraus_enum::{
    completeness_defect, enumerate_kraus_channel, ep_nonunitary_enumerated, gate_error_enumerated, kraus_operators,
};
pub use montecarlo::{haar_qubit, mc_entangling_power, substream};
pub use projectors::{ep_trace_form, tangle_via_projectors, ProjectorPair};
pub use suite::{random_cr, random_crs, random_su2, run_suite, CheckResult, VerifyReport};
