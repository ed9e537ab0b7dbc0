use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ResolvedConfig, RunConfig};
use super::format::{cases_csv, to_json, CaseRecord};
use crate::error::Result;
use crate::search::Case;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchiveMeta {
    pub tool: String,
    pub tool_version: String,
    pub timestamp_unix: u64,
    pub register: String,
    pub case_count: usize,
    pub config: RunConfig,
}

pub fn case_records(cases: &[Case]) -> Result<Vec<CaseRecord>> {
    cases.iter().enumerate().map(|(i, c)| CaseRecord::from_case(i + 1, c)).collect()
}

/// Writes `cases.json`, `cases.csv`, `meta.json` and one plan file per case
/// under `plans/`.
pub fn write_archive(dir: &Path, cfg: &ResolvedConfig, cases: &[Case]) -> Result<Vec<CaseRecord>> {
    fs::create_dir_all(dir)?;
    let records = case_records(cases)?;
    fs::write(dir.join("cases.json"), to_json(&records)?)?;
    fs::write(dir.join("cases.csv"), cases_csv(&records)?)?;
    let plans = dir.join("plans");
    if plans.exists() {
        fs::remove_dir_all(&plans)?;
    }
    fs::create_dir_all(&plans)?;
    for r in &records {
        fs::write(plans.join(format!("case_{:03}.json", r.case_id)), to_json(&r.plan)?)?;
    }
    let meta = ArchiveMeta {
        tool: env!("CARGO_PKG_NAME").into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        timestamp_unix: cfg.timestamp_unix,
        register: cfg
            .snapshot
            .register_path
            .as_ref()
            .map_or_else(|| "<bundled>".into(), |p| p.display().to_string()),
        case_count: records.len(),
        config: cfg.snapshot.clone(),
    };
    fs::write(dir.join("meta.json"), to_json(&meta)?)?;
    Ok(records)
}

pub fn read_archive(dir: &Path) -> Result<(ArchiveMeta, Vec<CaseRecord>)> {
    let meta = serde_json::from_str(&fs::read_to_string(dir.join("meta.json"))?)?;
    let cases = serde_json::from_str(&fs::read_to_string(dir.join("cases.json"))?)?;
    Ok((meta, cases))
}
