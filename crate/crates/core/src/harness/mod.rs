//! Manufactured-solution studies and their reports.

pub mod cases;
pub mod config;
pub mod report;
pub mod study;

pub use cases::{exact_fields, CaseName, CustomFields};
pub use config::{MeshConfig, ReportOptions, RunConfig, StudyMode};
pub use report::{StudyReport, StudyRow, COLUMNS};
pub use study::{
    convergence_study, diagnostics_study, locking_study, run_case, run_study, single_study, CaseRun, LockingStudy,
    MeshLevel, Study, StudyOutput,
};
