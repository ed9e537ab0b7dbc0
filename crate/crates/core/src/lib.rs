//! Design and verification of electron-nuclear GHZ states prepared with
//! dynamical-decoupling sequences on a hyperfine-coupled ¹³C register.

pub mod error;
pub mod io;
pub mod metrics;
pub mod mixed;
pub mod num;
pub mod oracle;
pub mod search;
pub mod spin;
pub mod su2;

pub use error::{Error, Result};
pub use spin::{ConditionalRotation, NuclearSpin, Register, SequenceBlock, SequencePlan, SequenceUnit};
pub use su2::{AxisAngle, Mat2};
pub use search::{Case, Scheme, SearchTolerances};
