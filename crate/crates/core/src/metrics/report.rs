use serde::{Deserialize, Serialize};

use super::invariants::{ep_max, g1, mway_ep_unitary, one_tangle_scaled};
use super::kraus::{gate_error, mway_ep_nonunitary};
use crate::error::{Error, Result};
use crate::num::sig12;
use crate::spin::{compose_register, ConditionalRotation, Register, SequencePlan};

/// Metrics of one plan with a chosen set of target nuclei. Per-spin vectors
/// follow register order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub ghz_size: usize,
    pub spins: Vec<String>,
    pub targets: Vec<String>,
    pub g1: Vec<f64>,
    pub one_tangles_scaled: Vec<f64>,
    pub ep_unitary: f64,
    pub ep_nonunitary: f64,
    pub ep_scaled: f64,
    pub ep_nonunitary_scaled: f64,
    pub gate_error: f64,
    pub total_time_us: f64,
}

impl MetricsReport {
    /// Copy with every float rounded to 12 significant digits.
    pub fn rounded(&self) -> Self {
        let r = |v: &[f64]| v.iter().map(|x| sig12(*x)).collect::<Vec<_>>();
        MetricsReport {
            ghz_size: self.ghz_size,
            spins: self.spins.clone(),
            targets: self.targets.clone(),
            g1: r(&self.g1),
            one_tangles_scaled: r(&self.one_tangles_scaled),
            ep_unitary: sig12(self.ep_unitary),
            ep_nonunitary: sig12(self.ep_nonunitary),
            ep_scaled: sig12(self.ep_scaled),
            ep_nonunitary_scaled: sig12(self.ep_nonunitary_scaled),
            gate_error: sig12(self.gate_error),
            total_time_us: sig12(self.total_time_us),
        }
    }
}

/// Splits rotations into (targets, spectators) by register index.
pub fn split_rotations(
    rotations: &[ConditionalRotation],
    targets: &[usize],
) -> Result<(Vec<ConditionalRotation>, Vec<ConditionalRotation>)> {
    let mut seen = vec![false; rotations.len()];
    for &t in targets {
        if t >= rotations.len() || seen[t] {
            return Err(Error::InvalidIndices(format!("bad or repeated target index {t}")));
        }
        seen[t] = true;
    }
    let tgt = targets.iter().map(|&t| rotations[t]).collect();
    let unw = rotations
        .iter()
        .zip(&seen)
        .filter(|(_, s)| !**s)
        .map(|(r, _)| *r)
        .collect();
    Ok((tgt, unw))
}

pub fn report_from_rotations(
    register: &Register,
    rotations: &[ConditionalRotation],
    targets: &[usize],
    total_time: f64,
) -> Result<MetricsReport> {
    if targets.is_empty() {
        return Err(Error::NoTargets);
    }
    let (tgt, unw) = split_rotations(rotations, targets)?;
    let g1s: Vec<f64> = rotations.iter().map(g1).collect();
    let m = targets.len() + 1;
    let ep_u = mway_ep_unitary(&tgt)?;
    let ep_e = mway_ep_nonunitary(&tgt, &unw)?;
    let err = gate_error(&tgt, &unw, None)?;
    Ok(MetricsReport {
        ghz_size: m,
        spins: register.spins().iter().map(|s| s.label.clone()).collect(),
        targets: targets.iter().map(|&t| register.spins()[t].label.clone()).collect(),
        one_tangles_scaled: g1s.iter().map(|g| one_tangle_scaled(*g)).collect(),
        g1: g1s,
        ep_unitary: ep_u,
        ep_nonunitary: ep_e,
        ep_scaled: ep_u / ep_max(m),
        ep_nonunitary_scaled: ep_e / ep_max(m),
        gate_error: err.infidelity,
        total_time_us: total_time * 1e6,
    })
}

/// Composes the plan for every spin and evaluates the metrics for `targets`.
pub fn metrics_report(register: &Register, plan: &SequencePlan, targets: &[usize]) -> Result<MetricsReport> {
    let rot = compose_register(register, plan)?;
    report_from_rotations(register, &rot, targets, plan.total_time())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{khz_to_rad, SequenceBlock, SequenceUnit, DEFAULT_LARMOR_KHZ};

    #[test]
    fn report_is_consistent() {
        let r = Register::bundled(khz_to_rad(DEFAULT_LARMOR_KHZ)).unwrap();
        let plan = SequencePlan::single(SequenceBlock::new(SequenceUnit::cpmg(), 4.2e-6, 30).unwrap());
        let rep = metrics_report(&r, &plan, &[2, 5]).unwrap();
        assert_eq!(rep.spins.len(), 27);
        assert_eq!(rep.targets, vec!["C3".to_string(), "C6".to_string()]);
        assert!(rep.ep_nonunitary <= rep.ep_unitary + 1e-15);
        assert!((0.0..=1.0).contains(&rep.ep_scaled));
        let expect = (1.0 - rep.g1[2]) * (1.0 - rep.g1[5]);
        assert!((rep.ep_scaled - expect).abs() < 1e-12);
        assert!(metrics_report(&r, &plan, &[2, 2]).is_err());
        assert!(metrics_report(&r, &plan, &[]).is_err());
    }
}
