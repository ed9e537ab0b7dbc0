//! Run configuration, register loading and result archives.

pub mod archive;
pub mod config;
pub mod format;

pub use archive::{case_records, read_archive, write_archive, ArchiveMeta};
pub use config::{load_register, ResolvedConfig, RunConfig};
pub use format::{cases_csv, fmt12, to_json, CaseRecord, PlanFile};
