use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("invalid pulse fractions: {0}")]
    InvalidPulseFractions(String),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid register: {0}")]
    InvalidRegister(String),

    #[error("unknown spin label `{0}`")]
    UnknownSpin(String),

    #[error("{path}:{line}: {msg}")]
    RegisterParse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("no target nuclei selected")]
    NoTargets,

    #[error("state is not normalized (norm² = {0})")]
    Unnormalized(f64),

    #[error("state length {len} does not match {qubits} qubits")]
    StateLength { len: usize, qubits: usize },

    #[error("odd M = {0} tangle requires a CR-generated state")]
    OddTangleUnsupported(usize),

    #[error("unsupported qubit count: {0}")]
    UnsupportedQubits(String),

    #[error("{what} exceeds cap ({value} > {cap}); {hint}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid index set: {0}")]
    InvalidIndices(String),

    #[error("value {value} outside [0, 1] by more than roundoff ({what})")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
