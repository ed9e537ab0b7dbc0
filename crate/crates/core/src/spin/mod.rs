//! Electron-conditioned nuclear dynamics under π-pulse sequences.

pub mod propagator;
pub mod register;
pub mod resonance;
pub mod sequence;

pub use propagator::{
    compose_matrices, compose_register, compose_sequence, conditional_fields, conditional_hamiltonians,
    unit_propagators, ConditionalRotation, G1Series, UnitPropagators,
};
pub use register::{khz_to_rad, rad_to_khz, NuclearSpin, Register, DEFAULT_LARMOR_KHZ};
pub use resonance::{scan_resonances, Resonance};
pub use sequence::{SequenceBlock, SequencePlan, SequenceUnit, UnitKind};
