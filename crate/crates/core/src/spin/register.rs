use std::collections::HashSet;
use std::f64::consts::TAU;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default nuclear Larmor frequency in kHz. Only a convenience default: the
/// field strength is a run parameter.
pub const DEFAULT_LARMOR_KHZ: f64 = 431.94;

const BUNDLED_CSV: &str = include_str!("../../data/register.csv");

pub fn khz_to_rad(khz: f64) -> f64 {
    khz * TAU * 1e3
}

pub fn rad_to_khz(w: f64) -> f64 {
    w / (TAU * 1e3)
}

/// One ¹³C nucleus. `a` and `b` are angular frequencies (rad/s).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuclearSpin {
    pub label: String,
    pub a: f64,
    pub b: f64,
}

impl NuclearSpin {
    pub fn from_khz(label: impl Into<String>, a_khz: f64, b_khz: f64) -> Self {
        NuclearSpin {
            label: label.into(),
            a: khz_to_rad(a_khz),
            b: khz_to_rad(b_khz),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Register {
    spins: Vec<NuclearSpin>,
    omega_larmor: f64,
}

impl Register {
    pub fn new(spins: Vec<NuclearSpin>, omega_larmor: f64) -> Result<Self> {
        if spins.is_empty() {
            return Err(Error::InvalidRegister("register is empty".into()));
        }
        if !(omega_larmor.is_finite() && omega_larmor > 0.0) {
            return Err(Error::InvalidRegister(format!(
                "Larmor frequency must be positive, got {omega_larmor}"
            )));
        }
        let mut seen = HashSet::new();
        for s in &spins {
            if !(s.b >= 0.0 && s.b.is_finite() && s.a.is_finite()) {
                return Err(Error::InvalidRegister(format!(
                    "spin {} has invalid hyperfine values",
                    s.label
                )));
            }
            if !seen.insert(s.label.as_str()) {
                return Err(Error::InvalidRegister(format!("duplicate label {}", s.label)));
            }
        }
        Ok(Register {
            spins,
            omega_larmor,
        })
    }

    /// The 27-spin register shipped with the crate.
    pub fn bundled(omega_larmor: f64) -> Result<Self> {
        Self::from_csv(BUNDLED_CSV.as_bytes(), Path::new("<bundled>"), omega_larmor)
    }

    pub fn bundled_csv() -> &'static str {
        BUNDLED_CSV
    }

    /// Parses `label,A_kHz,B_kHz` rows. `source` is used in error messages.
    pub fn from_csv<R: Read>(reader: R, source: &Path, omega_larmor: f64) -> Result<Self> {
        let err = |line: usize, msg: String| Error::RegisterParse {
            path: source.to_path_buf(),
            line,
            msg,
        };
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let headers = rdr.headers().map_err(|e| err(1, e.to_string()))?.clone();
        let expected = ["label", "A_kHz", "B_kHz"];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(err(1, format!("expected header `label,A_kHz,B_kHz`, got `{}`", headers.iter().collect::<Vec<_>>().join(","))));
        }
        let mut spins: Vec<NuclearSpin> = Vec::new();
        let mut seen = HashSet::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                err(line, e.to_string())
            })?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            if rec.len() != 3 {
                return Err(err(line, format!("expected 3 fields, found {}", rec.len())));
            }
            let label = rec[0].to_string();
            if label.is_empty() {
                return Err(err(line, "empty label".into()));
            }
            let num = |i: usize, name: &str| -> Result<f64> {
                rec[i]
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| err(line, format!("{name} `{}` is not a number", &rec[i])))
            };
            let a = num(1, "A_kHz")?;
            let b = num(2, "B_kHz")?;
            if b < 0.0 {
                return Err(err(line, format!("B_kHz must be non-negative, got {b}")));
            }
            if !seen.insert(label.clone()) {
                return Err(err(line, format!("duplicate label {label}")));
            }
            spins.push(NuclearSpin::from_khz(label, a, b));
        }
        if spins.is_empty() {
            return Err(err(1, "no spins in register file".into()));
        }
        Register::new(spins, omega_larmor)
    }

    pub fn spins(&self) -> &[NuclearSpin] {
        &self.spins
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn omega_larmor(&self) -> f64 {
        self.omega_larmor
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.spins
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownSpin(label.to_string()))
    }

    pub fn get(&self, label: &str) -> Result<&NuclearSpin> {
        self.index_of(label).map(|i| &self.spins[i])
    }

    /// Sub-register with the given indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Register> {
        let spins = indices
            .iter()
            .map(|&i| {
                self.spins
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::InvalidIndices(format!("spin index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Register::new(spins, self.omega_larmor)
    }

    pub fn with_larmor(&self, omega_larmor: f64) -> Result<Register> {
        Register::new(self.spins.clone(), omega_larmor)
    }
}
