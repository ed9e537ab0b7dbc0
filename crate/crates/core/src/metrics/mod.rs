//! Closed-form entanglement quantities of CR-type evolutions.

pub mod invariants;
pub mod kraus;
pub mod report;
pub mod tangle;

pub use invariants::{ep_max, g1, mway_ep_from_g1, mway_ep_unitary, one_tangle, one_tangle_scaled};
pub use kraus::{gate_error, kraus_factors, mway_ep_nonunitary, GateErrorReport, KrausFactorSet};
pub use report::{metrics_report, report_from_rotations, split_rotations, MetricsReport};
pub use tangle::{mtangle_pure, pure_concurrence, three_tangle_ckw, three_tangle_xyy};
