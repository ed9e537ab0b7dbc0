use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::tolerances::SearchTolerances;
use crate::error::Result;
use crate::metrics::one_tangle_scaled;
use crate::spin::resonance::scan_resonances;
use crate::spin::{unit_propagators, G1Series, Register, SequenceUnit};

/// A single-block (t, N) choice that entangles one spin with the electron
/// while leaving the rest of the register below the unwanted tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub spin: usize,
    pub k: u32,
    pub t: f64,
    pub n: u64,
    /// Scaled one-tangle of `spin` under the single block.
    pub one_tangle: f64,
    /// Largest scaled one-tangle among the other spins.
    pub max_unwanted: f64,
}

impl Candidate {
    pub fn duration(&self) -> f64 {
        self.n as f64 * self.t
    }
}

/// Largest N with N·t ≤ T_max.
pub fn n_max(t: f64, t_max: f64) -> u64 {
    let mut n = (t_max / t).floor() as u64;
    while n > 0 && n as f64 * t > t_max {
        n -= 1;
    }
    n
}

/// Local maxima of f over N = 1..=n_max, in increasing N, at most `limit`.
/// The right neighbour of n_max is f(n_max + 1), so the cut-off never
/// creates a maximum of its own.
pub fn n_maxima(f: impl Fn(u64) -> f64, n_max: u64, limit: usize) -> Vec<(u64, f64)> {
    let mut out = Vec::new();
    if n_max == 0 {
        return out;
    }
    let mut prev = f64::NEG_INFINITY;
    let mut cur = f(1);
    for n in 1..=n_max {
        let next = f(n + 1);
        if cur > prev && cur >= next {
            out.push((n, cur));
            if out.len() == limit {
                break;
            }
        }
        prev = cur;
        cur = next;
    }
    out
}

/// One-tangle series of every register spin for one unit time.
pub(crate) fn register_series(register: &Register, unit: &SequenceUnit, t: f64) -> Result<Vec<G1Series>> {
    register
        .spins()
        .iter()
        .map(|s| Ok(G1Series::new(&unit_propagators(s, register, unit, t)?)))
        .collect()
}

/// Candidates of one spin at one resonance, before ranking across t.
fn candidates_at(
    register: &Register,
    unit: &SequenceUnit,
    tol: &SearchTolerances,
    spin: usize,
    k: u32,
    grid: &[f64],
) -> Result<Vec<Vec<Candidate>>> {
    let mut per_t = Vec::new();
    for &t in grid {
        let series = register_series(register, unit, t)?;
        let target = &series[spin];
        let maxima = n_maxima(|n| one_tangle_scaled(target.g1(n)), n_max(t, tol.t_max), tol.n_truncation);
        let mut kept = Vec::new();
        for (n, ot) in maxima {
            if ot < tol.target_tol {
                continue;
            }
            let mut worst: f64 = 0.0;
            for (l, s) in series.iter().enumerate() {
                if l != spin {
                    worst = worst.max(one_tangle_scaled(s.g1(n)));
                    if worst > tol.unwanted_tol {
                        break;
                    }
                }
            }
            if worst <= tol.unwanted_tol {
                kept.push(Candidate {
                    spin,
                    k,
                    t,
                    n,
                    one_tangle: ot,
                    max_unwanted: worst,
                });
            }
        }
        if !kept.is_empty() {
            per_t.push(kept);
        }
    }
    Ok(per_t)
}

/// Orders candidates best first: one-tangle descending, then duration,
/// t and N ascending.
pub fn candidate_order(a: &Candidate, b: &Candidate) -> std::cmp::Ordering {
    b.one_tangle
        .total_cmp(&a.one_tangle)
        .then(a.duration().total_cmp(&b.duration()))
        .then(a.t.total_cmp(&b.t))
        .then(a.n.cmp(&b.n))
}

/// Single-block candidates per spin (register index), best first. Spins
/// without any candidate are absent.
pub fn per_spin_candidates(
    register: &Register,
    unit: &SequenceUnit,
    tol: &SearchTolerances,
) -> Result<BTreeMap<usize, Vec<Candidate>>> {
    tol.validate()?;
    unit.validate()?;
    let mut out = BTreeMap::new();
    for (i, spin) in register.spins().iter().enumerate() {
        let mut all = Vec::new();
        for res in scan_resonances(spin, register, unit, tol.k_max, tol.t_window, tol.t_step)? {
            let mut per_t = candidates_at(register, unit, tol, i, res.k, &res.grid)?;
            // keep the best t values, ranked by their best candidate
            for c in per_t.iter_mut() {
                c.sort_by(candidate_order);
            }
            per_t.sort_by(|a, b| candidate_order(&a[0], &b[0]));
            per_t.truncate(tol.t_keep);
            all.extend(per_t.into_iter().flatten());
        }
        if !all.is_empty() {
            all.sort_by(candidate_order);
            out.insert(i, all);
        }
    }
    Ok(out)
}
