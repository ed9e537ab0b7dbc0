use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixed::CHI_SAMPLES;
use crate::search::{Scheme, SearchTolerances};
use crate::spin::{khz_to_rad, Register, SequenceUnit, DEFAULT_LARMOR_KHZ};

/// Run configuration as read from JSON. Times are in μs and frequencies in
/// kHz; omitted tolerances fall back to the default table row for the
/// scheme and GHZ size. Relative paths are taken from the config file's
/// directory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub register_path: Option<PathBuf>,
    #[serde(default)]
    pub scheme: Option<Scheme>,
    #[serde(default)]
    pub ghz_size: Option<usize>,
    #[serde(default)]
    pub unit: Option<String>,
    #[serde(default, rename = "omega_larmor_kHz")]
    pub omega_larmor_khz: Option<f64>,
    #[serde(default, rename = "T_max_us")]
    pub t_max_us: Option<f64>,
    #[serde(default)]
    pub gate_error_tol: Option<f64>,
    #[serde(default)]
    pub target_tol: Option<f64>,
    #[serde(default)]
    pub unwanted_tol: Option<f64>,
    #[serde(default)]
    pub k_max: Option<u32>,
    #[serde(default)]
    pub t_window_us: Option<f64>,
    #[serde(default)]
    pub t_step_us: Option<f64>,
    #[serde(default)]
    pub n_truncation: Option<usize>,
    #[serde(default)]
    pub t_keep: Option<usize>,
    #[serde(default)]
    pub combo_budget: Option<usize>,
    #[serde(default)]
    pub beam_width: Option<usize>,
    #[serde(default)]
    pub rank_weights: Option<[f64; 3]>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub rng_seed: Option<u64>,
    #[serde(default)]
    pub timestamp_unix: Option<u64>,
    #[serde(default)]
    pub p_points: Option<usize>,
    #[serde(default)]
    pub chi_samples: Option<usize>,
    #[serde(default)]
    pub mc_samples: Option<usize>,
    #[serde(default)]
    pub verify_trials: Option<usize>,
}

/// Fully validated run settings.
#[derive(Clone, Debug)]
pub struct ResolvedConfig {
    pub register: Register,
    pub scheme: Scheme,
    pub unit: SequenceUnit,
    pub tolerances: SearchTolerances,
    pub rank_weights: [f64; 3],
    pub output_dir: PathBuf,
    pub rng_seed: u64,
    pub timestamp_unix: u64,
    pub p_points: usize,
    pub chi_samples: usize,
    pub mc_samples: usize,
    pub verify_trials: usize,
    /// The input with every default filled in, for the archive.
    pub snapshot: RunConfig,
}

pub fn load_register(path: &Path, omega_larmor: f64) -> Result<Register> {
    let f = File::open(path).map_err(|e| Error::Config(format!("cannot open register {}: {e}", path.display())))?;
    Register::from_csv(f, path, omega_larmor)
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

/// Archive timestamp: explicit value, else `SOURCE_DATE_EPOCH`, else now.
fn timestamp(explicit: Option<u64>) -> Result<u64> {
    if let Some(t) = explicit {
        return Ok(t);
    }
    if let Ok(s) = std::env::var("SOURCE_DATE_EPOCH") {
        return s
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("SOURCE_DATE_EPOCH `{s}` is not an integer")));
    }
    Ok(std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<ResolvedConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&text)?.resolve(base)
    }

    /// Validates everything and fills defaults.
    pub fn resolve(&self, base: &Path) -> Result<ResolvedConfig> {
        let scheme = self.scheme.unwrap_or(Scheme::Sequential);
        let ghz = self.ghz_size.unwrap_or(3);
        let mut tol = SearchTolerances::table(scheme, ghz)?;
        if let Some(v) = self.t_max_us {
            tol.t_max = positive("T_max_us", v)? * 1e-6;
        }
        if let Some(v) = self.gate_error_tol {
            tol.gate_error_tol = v;
        }
        if let Some(v) = self.target_tol {
            tol.target_tol = v;
        }
        if let Some(v) = self.unwanted_tol {
            tol.unwanted_tol = v;
        }
        if let Some(v) = self.k_max {
            tol.k_max = v;
        }
        if let Some(v) = self.t_window_us {
            tol.t_window = positive("t_window_us", v)? * 1e-6;
        }
        if let Some(v) = self.t_step_us {
            tol.t_step = positive("t_step_us", v)? * 1e-6;
        }
        if let Some(v) = self.n_truncation {
            tol.n_truncation = v;
        }
        if let Some(v) = self.t_keep {
            tol.t_keep = v;
        }
        if let Some(v) = self.combo_budget {
            tol.combo_budget = v;
        }
        if let Some(v) = self.beam_width {
            tol.beam_width = v;
        }
        tol.validate()?;
        let unit_name = self.unit.clone().unwrap_or_else(|| "cpmg".into());
        let unit = SequenceUnit::parse(&unit_name).map_err(|e| Error::Config(e.to_string()))?;
        let omega_khz = positive("omega_larmor_kHz", self.omega_larmor_khz.unwrap_or(DEFAULT_LARMOR_KHZ))?;
        let omega = khz_to_rad(omega_khz);
        let register = match &self.register_path {
            Some(p) => load_register(&base.join(p), omega)?,
            None => Register::bundled(omega)?,
        };
        let weights = self.rank_weights.unwrap_or([1.0, 0.0, 0.0]);
        crate::search::rank::check_weights(weights)?;
        let output_dir = base.join(self.output_dir.clone().unwrap_or_else(|| PathBuf::from("out")));
        let p_points = self.p_points.unwrap_or(101);
        let chi_samples = self.chi_samples.unwrap_or(CHI_SAMPLES);
        let mc_samples = self.mc_samples.unwrap_or(10_000);
        let verify_trials = self.verify_trials.unwrap_or(20);
        if p_points < 2 || chi_samples < 8 || mc_samples < 1000 || verify_trials == 0 {
            return Err(Error::Config(
                "need p_points ≥ 2, chi_samples ≥ 8, mc_samples ≥ 1000, verify_trials ≥ 1".into(),
            ));
        }
        let timestamp_unix = timestamp(self.timestamp_unix)?;
        let snapshot = RunConfig {
            register_path: self.register_path.clone(),
            scheme: Some(scheme),
            ghz_size: Some(ghz),
            unit: Some(unit_name),
            omega_larmor_khz: Some(omega_khz),
            t_max_us: Some(tol.t_max * 1e6),
            gate_error_tol: Some(tol.gate_error_tol),
            target_tol: Some(tol.target_tol),
            unwanted_tol: Some(tol.unwanted_tol),
            k_max: Some(tol.k_max),
            t_window_us: Some(tol.t_window * 1e6),
            t_step_us: Some(tol.t_step * 1e6),
            n_truncation: Some(tol.n_truncation),
            t_keep: Some(tol.t_keep),
            combo_budget: Some(tol.combo_budget),
            beam_width: Some(tol.beam_width),
            rank_weights: Some(weights),
            output_dir: self.output_dir.clone(),
            rng_seed: Some(self.rng_seed.unwrap_or(0)),
            timestamp_unix: Some(timestamp_unix),
            p_points: Some(p_points),
            chi_samples: Some(chi_samples),
            mc_samples: Some(mc_samples),
            verify_trials: Some(verify_trials),
        };
        Ok(ResolvedConfig {
            register,
            scheme,
            unit,
            tolerances: tol,
            rank_weights: weights,
            output_dir,
            rng_seed: self.rng_seed.unwrap_or(0),
            timestamp_unix,
            p_points,
            chi_samples,
            mc_samples,
            verify_trials,
            snapshot,
        })
    }
}
