//! Config-driven experiments: presets, runners and machine-readable reports.

mod config;
pub mod presets;
mod report;
mod run;

pub use config::{
    ExperimentConfig, ExperimentKind, ExponentSpec, HardyConfig, HardyTestSpec, OutputFormat,
    OutputSpec, SCHEMA_VERSION,
};
pub use report::{
    emit_report, BoundednessReport, ChainRow, HardySummary, HedbergRow, Row, RunStats, Verdict,
    CSV_HEADER, RADIUS_CONVENTION, REPORT_SCHEMA,
};
pub use run::{
    condition_reports, kernel_reports, run, run_adams, run_hardy, run_lemma_local, run_spanne,
    run_spanne_weak, weight_reports,
};
