use serde::{Deserialize, Serialize};

use super::tolerances::{Scheme, SearchTolerances};
use crate::error::Result;
use crate::metrics::{metrics_report, MetricsReport};
use crate::spin::{Register, SequencePlan};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub scheme: Scheme,
    pub spin_labels: Vec<String>,
    /// Register indices of the target spins, ascending.
    pub targets: Vec<usize>,
    pub plan: SequencePlan,
    pub metrics: MetricsReport,
    pub rank_score: f64,
}

impl Case {
    /// Evaluates the plan and returns the case if it meets every tolerance.
    pub fn evaluate(
        register: &Register,
        scheme: Scheme,
        targets: &[usize],
        plan: SequencePlan,
        tol: &SearchTolerances,
    ) -> Result<Option<Case>> {
        let metrics = metrics_report(register, &plan, targets)?;
        if !meets_tolerances(&metrics, targets, plan.total_time(), tol) {
            return Ok(None);
        }
        Ok(Some(Case {
            scheme,
            spin_labels: targets.iter().map(|&i| register.spins()[i].label.clone()).collect(),
            targets: targets.to_vec(),
            rank_score: metrics.ep_scaled,
            plan,
            metrics,
        }))
    }

    pub fn total_time(&self) -> f64 {
        self.plan.total_time()
    }

    pub fn satisfies(&self, tol: &SearchTolerances) -> bool {
        meets_tolerances(&self.metrics, &self.targets, self.total_time(), tol)
    }
}

/// T ≤ T_max, target one-tangles ≥ δ_t, unwanted ≤ δ_u, gate error ≤ δ_E.
pub fn meets_tolerances(m: &MetricsReport, targets: &[usize], total_time: f64, tol: &SearchTolerances) -> bool {
    if total_time > tol.t_max || m.gate_error > tol.gate_error_tol {
        return false;
    }
    m.one_tangles_scaled.iter().enumerate().all(|(i, &ot)| {
        if targets.contains(&i) {
            ot >= tol.target_tol
        } else {
            ot <= tol.unwanted_tol
        }
    })
}

/// ep_scaled descending, gate time ascending, then labels.
pub fn case_order(a: &Case, b: &Case) -> std::cmp::Ordering {
    b.metrics
        .ep_scaled
        .total_cmp(&a.metrics.ep_scaled)
        .then(a.total_time().total_cmp(&b.total_time()))
        .then(a.spin_labels.cmp(&b.spin_labels))
}
