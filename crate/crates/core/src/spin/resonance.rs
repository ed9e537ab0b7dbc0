use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::propagator::unit_propagators_raw;
use super::register::{NuclearSpin, Register};
use super::sequence::SequenceUnit;
use crate::error::{Error, Result};
use crate::num::{golden_min, sig12};
use crate::su2::{dot, HalfAngle};

/// Samples per coarse window when locating a resonance.
const COARSE_SAMPLES: usize = 4000;
const GOLDEN_ITERS: usize = 80;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub k: u32,
    /// Analytic centre of the coarse scan (s).
    pub seed: f64,
    /// Refined resonance time (s); `None` when the spin has no resonance in
    /// this window.
    pub t_k: Option<f64>,
    /// Fine grid around t_k (s), empty when `t_k` is `None`.
    pub grid: Vec<f64>,
}

fn effective_precession(spin: &NuclearSpin, omega_larmor: f64) -> f64 {
    let w = omega_larmor + 0.5 * spin.a;
    if w > 0.0 {
        w
    } else {
        omega_larmor
    }
}

/// First-order estimate of the k-th resonance: t_k = (2k−1)·2π/(ω_L + A/2).
pub fn resonance_seed(spin: &NuclearSpin, omega_larmor: f64, k: u32) -> f64 {
    (2 * k - 1) as f64 * TAU / effective_precession(spin, omega_larmor)
}

/// n0·n1 of one unit with raw (uncanonicalized) half-angle axes.
/// Returns +1 when either branch is numerically the identity.
pub fn unit_axis_dot(spin: &NuclearSpin, omega_larmor: f64, unit: &SequenceUnit, t: f64) -> f64 {
    let up = match unit_propagators_raw(spin, omega_larmor, unit, t) {
        Ok(up) => up,
        Err(_) => return 1.0,
    };
    let (v0, v1) = if up.flips {
        (up.v1 * up.v0, up.v0 * up.v1)
    } else {
        (up.v0, up.v1)
    };
    let a = HalfAngle::of(&v0);
    let b = HalfAngle::of(&v1);
    if a.theta.sin() < 1e-9 || b.theta.sin() < 1e-9 {
        return 1.0;
    }
    dot(&a.axis, &b.axis)
}

/// Fine grid t_k ± window with spacing `step`, limited to t > 0.
///
/// Grid points are held as 12-digit microsecond values so that a time read
/// back from a written plan reproduces the same seconds value bit for bit.
pub fn fine_grid(center: f64, window: f64, step: f64) -> Vec<f64> {
    let half = (window / step + 1e-9).floor() as i64;
    (-half..=half)
        .map(|i| sig12((center + i as f64 * step) * 1e6) * 1e-6)
        .filter(|t| *t > 0.0)
        .collect()
}

/// Locates the k-th resonance as the minimum of n0·n1 over the coarse
/// window seed ± half the resonance spacing.
pub fn locate_resonance(spin: &NuclearSpin, omega_larmor: f64, unit: &SequenceUnit, k: u32) -> Option<f64> {
    let seed = resonance_seed(spin, omega_larmor, k);
    let half = TAU / effective_precession(spin, omega_larmor);
    let lo = (seed - half).max(0.0);
    let hi = seed + half;
    let step = (hi - lo) / COARSE_SAMPLES as f64;
    let f = |t: f64| unit_axis_dot(spin, omega_larmor, unit, t);
    let samples: Vec<f64> = (0..=COARSE_SAMPLES).map(|i| f(lo + i as f64 * step)).collect();
    let (imin, dmin) = samples
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    if imin == 0 || imin == COARSE_SAMPLES || 1.0 - dmin <= 1e-12 {
        return None;
    }
    let a = lo + (imin - 1) as f64 * step;
    let b = lo + (imin + 1) as f64 * step;
    let (t, v) = golden_min(f, a, b, GOLDEN_ITERS);
    Some(if v <= dmin { t } else { lo + imin as f64 * step })
}

pub fn scan_resonances(
    spin: &NuclearSpin,
    register: &Register,
    unit: &SequenceUnit,
    k_max: u32,
    window: f64,
    grid_step: f64,
) -> Result<Vec<Resonance>> {
    if k_max == 0 {
        return Err(Error::Config("k_max must be at least 1".into()));
    }
    if !(window > 0.0 && grid_step > 0.0) {
        return Err(Error::Config("resonance window and grid step must be positive".into()));
    }
    unit.validate()?;
    let w = register.omega_larmor();
    Ok((1..=k_max)
        .map(|k| {
            let t_k = locate_resonance(spin, w, unit, k);
            Resonance {
                k,
                seed: resonance_seed(spin, w, k),
                t_k,
                grid: t_k.map(|c| fine_grid(c, window, grid_step)).unwrap_or_default(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::register::{khz_to_rad, DEFAULT_LARMOR_KHZ};

    fn reg() -> Register {
        Register::bundled(khz_to_rad(DEFAULT_LARMOR_KHZ)).unwrap()
    }

    #[test]
    fn commuting_spin_is_resonance_free() {
        let r = reg();
        let res = scan_resonances(r.get("C24").unwrap(), &r, &SequenceUnit::cpmg(), 4, 0.25e-6, 10e-9).unwrap();
        assert!(res.iter().all(|x| x.t_k.is_none() && x.grid.is_empty()));
    }

    #[test]
    fn first_resonance_is_antiparallel() {
        let r = reg();
        for s in r.spins().iter().filter(|s| s.b > 0.0) {
            let t = locate_resonance(s, r.omega_larmor(), &SequenceUnit::cpmg(), 1).unwrap();
            let d = unit_axis_dot(s, r.omega_larmor(), &SequenceUnit::cpmg(), t);
            assert!(d < -0.9, "{} at {t}: {d}", s.label);
            let seed = resonance_seed(s, r.omega_larmor(), 1);
            assert!((t - seed).abs() < 0.05e-6, "{}: {t} vs seed {seed}", s.label);
        }
    }

    #[test]
    fn grid_matches_window() {
        let g = fine_grid(5e-6, 0.25e-6, 10e-9);
        assert_eq!(g.len(), 51);
        assert!((g[25] - 5e-6).abs() < 1e-18);
        assert!((g[50] - g[0] - 0.5e-6).abs() < 1e-15);
    }

}
