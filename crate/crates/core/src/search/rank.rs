use super::case::Case;
use super::tolerances::SearchTolerances;
use crate::error::{Error, Result};

pub fn rank_score(case: &Case, weights: [f64; 3], tol: &SearchTolerances) -> f64 {
    weights[0] * case.metrics.ep_scaled
        + weights[1] * (1.0 - case.total_time() / tol.t_max)
        + weights[2] * (1.0 - case.metrics.gate_error / tol.gate_error_tol)
}

pub fn check_weights(weights: [f64; 3]) -> Result<()> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("rank weights must be non-negative and sum to 1, got {weights:?}")));
    }
    Ok(())
}

/// Scores every case and sorts by score descending; ties keep spin-label
/// order, then insertion order.
pub fn rank_cases(mut cases: Vec<Case>, weights: [f64; 3], tol: &SearchTolerances) -> Result<Vec<Case>> {
    check_weights(weights)?;
    for c in cases.iter_mut() {
        c.rank_score = rank_score(c, weights, tol);
    }
    cases.sort_by(|a, b| b.rank_score.total_cmp(&a.rank_score).then(a.spin_labels.cmp(&b.spin_labels)));
    Ok(cases)
}
