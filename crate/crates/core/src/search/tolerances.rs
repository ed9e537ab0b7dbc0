use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Sequential,
    Multispin,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Sequential => "sequential",
            Scheme::Multispin => "multispin",
        }
    }
}

/// Search thresholds and grid settings. Times are in seconds; one-tangle
/// tolerances are in units of the maximal one-tangle 2/9.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchTolerances {
    pub ghz_size: usize,
    pub t_max: f64,
    pub gate_error_tol: f64,
    pub target_tol: f64,
    pub unwanted_tol: f64,
    pub k_max: u32,
    pub t_window: f64,
    pub t_step: f64,
    /// N-maxima kept per unit time.
    pub n_truncation: usize,
    /// Unit times kept per (spin, resonance).
    pub t_keep: usize,
    /// Upper bound on block combinations tried per spin subset.
    pub combo_budget: usize,
    pub beam_width: usize,
}

pub const DEFAULT_K_MAX: u32 = 10;
pub const DEFAULT_T_WINDOW: f64 = 0.25e-6;
pub const DEFAULT_T_STEP: f64 = 10e-9;
pub const DEFAULT_N_TRUNCATION: usize = 30;
pub const DEFAULT_T_KEEP: usize = 50;
pub const DEFAULT_COMBO_BUDGET: usize = 20_000;
pub const DEFAULT_BEAM_WIDTH: usize = 5000;
/// Candidates per spin for beam-searched subset sizes.
pub const BEAM_PER_SPIN_CAP: usize = 20;

// (M, T_max μs, δ_E, δ_t, δ_u)
const SEQUENTIAL_TABLE: [(usize, f64, f64, f64, f64); 8] = [
    (3, 2000.0, 0.1, 0.99, 0.1),
    (4, 2000.0, 0.1, 0.99, 0.1),
    (5, 2300.0, 0.1, 0.9, 0.1),
    (6, 2500.0, 0.11, 0.9, 0.12),
    (7, 3300.0, 0.12, 0.9, 0.12),
    (8, 3700.0, 0.13, 0.9, 0.12),
    (9, 4000.0, 0.13, 0.85, 0.15),
    (10, 4000.0, 0.19, 0.87, 0.22),
];

const MULTISPIN_TABLE: [(usize, f64, f64, f64, f64); 7] = [
    (3, 2000.0, 0.1, 0.9, 0.1),
    (4, 2000.0, 0.1, 0.9, 0.1),
    (5, 2300.0, 0.1, 0.84, 0.1),
    (6, 2500.0, 0.13, 0.88, 0.12),
    (7, 2800.0, 0.13, 0.85, 0.15),
    (8, 3000.0, 0.15, 0.85, 0.15),
    (9, 3000.0, 0.15, 0.82, 0.15),
];

impl SearchTolerances {
    /// Default tolerances for a GHZ size and scheme.
    pub fn table(scheme: Scheme, ghz_size: usize) -> Result<Self> {
        let table: &[_] = match scheme {
            Scheme::Sequential => &SEQUENTIAL_TABLE,
            Scheme::Multispin => &MULTISPIN_TABLE,
        };
        let row = table
            .iter()
            .find(|r| r.0 == ghz_size)
            .ok_or_else(|| Error::Config(format!("no default {} tolerances for GHZ size {ghz_size}", scheme.as_str())))?;
        Ok(SearchTolerances {
            ghz_size,
            t_max: row.1 * 1e-6,
            gate_error_tol: row.2,
            target_tol: row.3,
            unwanted_tol: row.4,
            k_max: DEFAULT_K_MAX,
            t_window: DEFAULT_T_WINDOW,
            t_step: DEFAULT_T_STEP,
            n_truncation: DEFAULT_N_TRUNCATION,
            t_keep: DEFAULT_T_KEEP,
            combo_budget: DEFAULT_COMBO_BUDGET,
            beam_width: DEFAULT_BEAM_WIDTH,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.ghz_size < 3 {
            return bad(format!("GHZ size must be at least 3, got {}", self.ghz_size));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return bad(format!("T_max must be positive, got {}", self.t_max));
        }
        for (name, v) in [
            ("gate error tolerance", self.gate_error_tol),
            ("target one-tangle tolerance", self.target_tol),
            ("unwanted one-tangle tolerance", self.unwanted_tol),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return bad(format!("{name} must lie in (0, 1], got {v}"));
            }
        }
        if self.k_max == 0 {
            return bad("k_max must be at least 1".into());
        }
        if !(self.t_window > 0.0 && self.t_step > 0.0 && self.t_window.is_finite() && self.t_step.is_finite()) {
            return bad("t_window and t_step must be positive".into());
        }
        if self.n_truncation == 0 || self.t_keep == 0 || self.combo_budget == 0 || self.beam_width == 0 {
            return bad("truncation counts must be at least 1".into());
        }
        Ok(())
    }

    /// Candidates kept per spin so that the cross-product over M − 1 spins
    /// stays within the combination budget. Beam-searched sizes use a fixed
    /// cap, since the beam bounds their cost.
    pub fn per_spin_cap(&self) -> usize {
        if self.ghz_size - 1 > crate::search::sequential::EXACT_SUBSET_LIMIT {
            return BEAM_PER_SPIN_CAP;
        }
        let k = (self.ghz_size - 1) as f64;
        ((self.combo_budget as f64).powf(1.0 / k) + 1e-9).floor().max(1.0) as usize
    }
}
