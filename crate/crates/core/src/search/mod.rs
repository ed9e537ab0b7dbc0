//! Sequence searches over a register for the sequential (one block per
//! target) and multi-spin (single block) schemes.

pub mod candidates;
pub mod case;
pub mod multispin;
pub mod rank;
pub mod sequential;
pub mod tolerances;

pub use candidates::{per_spin_candidates, Candidate};
pub use case::{case_order, meets_tolerances, Case};
pub use multispin::{multispin_hits, search_multispin, MultispinHit};
pub use rank::{rank_cases, rank_score};
pub use sequential::{search_sequential, search_sequential_from};
pub use tolerances::{Scheme, SearchTolerances};
