use std::collections::BTreeMap;

use super::candidates::{n_max, register_series};
use super::case::{case_order, Case};
use super::tolerances::{Scheme, SearchTolerances};
use crate::error::Result;
use crate::metrics::one_tangle_scaled;
use crate::spin::resonance::scan_resonances;
use crate::spin::{Register, SequenceBlock, SequencePlan, SequenceUnit};

/// A single block under which exactly M − 1 spins pass the target
/// tolerance and all others stay below the unwanted tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct MultispinHit {
    pub targets: Vec<usize>,
    pub t: f64,
    pub n: u64,
    /// Product of the target scaled one-tangles.
    pub ep_scaled: f64,
}

/// Unit times of every spin's resonance windows, deduplicated and sorted.
pub fn multispin_times(register: &Register, unit: &SequenceUnit, tol: &SearchTolerances) -> Result<Vec<f64>> {
    let mut ts = Vec::new();
    for spin in register.spins() {
        for res in scan_resonances(spin, register, unit, tol.k_max, tol.t_window, tol.t_step)? {
            ts.extend(res.grid);
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    Ok(ts)
}

/// Scans every (t, N) with N·t ≤ T_max for exact multi-spin hits.
pub fn multispin_hits(register: &Register, unit: &SequenceUnit, tol: &SearchTolerances) -> Result<Vec<MultispinHit>> {
    tol.validate()?;
    unit.validate()?;
    let k = tol.ghz_size - 1;
    let mut hits = Vec::new();
    let mut targets = Vec::with_capacity(k + 1);
    for t in multispin_times(register, unit, tol)? {
        let series = register_series(register, unit, t)?;
        'n: for n in 1..=n_max(t, tol.t_max) {
            targets.clear();
            let mut ep = 1.0;
            for (l, s) in series.iter().enumerate() {
                let ot = one_tangle_scaled(s.g1(n));
                if ot >= tol.target_tol {
                    targets.push(l);
                    ep *= ot;
                    if targets.len() > k {
                        continue 'n;
                    }
                } else if ot > tol.unwanted_tol {
                    continue 'n;
                }
            }
            if targets.len() == k {
                hits.push(MultispinHit {
                    targets: targets.clone(),
                    t,
                    n,
                    ep_scaled: ep,
                });
            }
        }
    }
    Ok(hits)
}

/// Multi-spin scheme: single blocks that entangle M − 1 spins at once.
/// Per target set the hit with the largest entangling power that meets
/// every tolerance is kept.
pub fn search_multispin(register: &Register, unit: &SequenceUnit, tol: &SearchTolerances) -> Result<Vec<Case>> {
    let hits = multispin_hits(register, unit, tol)?;
    let mut groups: BTreeMap<Vec<usize>, Vec<MultispinHit>> = BTreeMap::new();
    for h in hits {
        groups.entry(h.targets.clone()).or_default().push(h);
    }
    let mut cases = Vec::new();
    for (targets, mut hs) in groups {
        hs.sort_by(|a, b| {
            b.ep_scaled
                .total_cmp(&a.ep_scaled)
                .then((a.n as f64 * a.t).total_cmp(&(b.n as f64 * b.t)))
                .then(a.t.total_cmp(&b.t))
                .then(a.n.cmp(&b.n))
        });
        for h in hs {
            let plan = SequencePlan::single(SequenceBlock::new(unit.clone(), h.t, h.n)?);
            if let Some(c) = Case::evaluate(register, Scheme::Multispin, &targets, plan, tol)? {
                cases.push(c);
                break;
            }
        }
    }
    cases.sort_by(case_order);
    Ok(cases)
}
