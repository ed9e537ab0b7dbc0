use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::sig12;
use crate::search::{Case, Scheme};
use crate::spin::{SequenceBlock, SequencePlan, SequenceUnit};

/// Shortest decimal form of a value rounded to 12 significant digits.
pub fn fmt12(x: f64) -> String {
    format!("{}", sig12(x))
}

pub fn join12(xs: &[f64]) -> String {
    xs.iter().map(|x| fmt12(*x)).collect::<Vec<_>>().join(";")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockRecord {
    pub t_us: f64,
    #[serde(rename = "N")]
    pub n: u64,
}

/// Plan file: unit, blocks in μs and the target spin labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    pub unit: String,
    pub targets: Vec<String>,
    pub blocks: Vec<BlockRecord>,
}

impl PlanFile {
    pub fn from_plan(plan: &SequencePlan, targets: Vec<String>) -> Result<Self> {
        let unit = plan
            .blocks
            .first()
            .map(|b| b.unit.to_string())
            .ok_or_else(|| Error::InvalidSequence("plan has no blocks".into()))?;
        if plan.blocks.iter().any(|b| b.unit.to_string() != unit) {
            return Err(Error::InvalidSequence("plan files hold a single unit type".into()));
        }
        Ok(PlanFile {
            unit,
            targets,
            blocks: plan
                .blocks
                .iter()
                .map(|b| BlockRecord {
                    t_us: sig12(b.t * 1e6),
                    n: b.n,
                })
                .collect(),
        })
    }

    pub fn to_plan(&self) -> Result<SequencePlan> {
        let unit = SequenceUnit::parse(&self.unit)?;
        if self.blocks.is_empty() {
            return Err(Error::InvalidSequence("plan has no blocks".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| SequenceBlock::new(unit.clone(), b.t_us * 1e-6, b.n))
            .collect::<Result<Vec<_>>>()?;
        Ok(SequencePlan::new(blocks))
    }
}

/// One archived case with 12-digit values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub case_id: usize,
    pub scheme: Scheme,
    pub spins: Vec<String>,
    pub plan: PlanFile,
    #[serde(rename = "T_ms")]
    pub t_ms: f64,
    pub ep_scaled: f64,
    pub ep_nonunitary_scaled: f64,
    pub gate_error: f64,
    /// Scaled one-tangles of the targets, in `spins` order.
    pub one_tangles_scaled: Vec<f64>,
    /// Largest scaled one-tangle among the spectators.
    pub max_unwanted_scaled: f64,
    pub rank_score: f64,
}

impl CaseRecord {
    pub fn from_case(case_id: usize, c: &Case) -> Result<Self> {
        let m = c.metrics.rounded();
        let ots = &m.one_tangles_scaled;
        Ok(CaseRecord {
            case_id,
            scheme: c.scheme,
            spins: c.spin_labels.clone(),
            plan: PlanFile::from_plan(&c.plan, c.spin_labels.clone())?,
            t_ms: sig12(c.total_time() * 1e3),
            ep_scaled: m.ep_scaled,
            ep_nonunitary_scaled: m.ep_nonunitary_scaled,
            gate_error: m.gate_error,
            one_tangles_scaled: c.targets.iter().map(|&i| ots[i]).collect(),
            max_unwanted_scaled: ots
                .iter()
                .enumerate()
                .filter(|(i, _)| !c.targets.contains(i))
                .map(|(_, v)| *v)
                .fold(0.0, f64::max),
            rank_score: sig12(c.rank_score),
        })
    }
}

pub const CASE_CSV_HEADER: [&str; 8] = [
    "case_id",
    "spins",
    "blocks_t_us",
    "blocks_N",
    "T_ms",
    "ep_scaled",
    "gate_error",
    "one_tangles_scaled",
];

pub fn cases_csv(records: &[CaseRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CASE_CSV_HEADER)?;
    for r in records {
        let ts: Vec<f64> = r.plan.blocks.iter().map(|b| b.t_us).collect();
        let ns: Vec<String> = r.plan.blocks.iter().map(|b| b.n.to_string()).collect();
        w.write_record([
            r.case_id.to_string(),
            r.spins.join(";"),
            join12(&ts),
            ns.join(";"),
            fmt12(r.t_ms),
            fmt12(r.ep_scaled),
            fmt12(r.gate_error),
            join12(&r.one_tangles_scaled),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error())).map(|b| String::from_utf8_lossy(&b).into_owned())
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_round_trip_is_exact() {
        let t = sig12(17.1791980598 + 1e-13) * 1e-6;
        let plan = SequencePlan::new(vec![
            SequenceBlock::new(SequenceUnit::cpmg(), t, 46).unwrap(),
            SequenceBlock::new(SequenceUnit::cpmg(), 38.258015366e-6, 20).unwrap(),
        ]);
        let f = PlanFile::from_plan(&plan, vec!["C6".into(), "C19".into()]).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        let back: PlanFile = serde_json::from_str(&text).unwrap();
        let p2 = back.to_plan().unwrap();
        for (a, b) in plan.blocks.iter().zip(&p2.blocks) {
            assert_eq!(a.t.to_bits(), b.t.to_bits());
            assert_eq!(a.n, b.n);
        }
    }

    #[test]
    fn fmt12_is_short() {
        assert_eq!(fmt12(0.1 + 0.2), "0.3");
        assert_eq!(fmt12(1555.4000000001), "1555.4");
        assert_eq!(join12(&[1.0, 2.5]), "1;2.5");
    }

    #[test]
    fn rejects_bad_plans() {
        let bad = r#"{"unit":"cpmg","targets":[],"blocks":[]}"#;
        let f: PlanFile = serde_json::from_str(bad).unwrap();
        assert!(f.to_plan().is_err());
        assert!(serde_json::from_str::<PlanFile>(r#"{"unit":"cpmg","targets":[],"blocks":[],"x":1}"#).is_err());
    }
}
