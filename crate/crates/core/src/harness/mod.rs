//! Seeded trials, experiment sweeps and reports.

mod config;
mod experiment;
mod pipeline;
mod report;

pub use config::{ExperimentConfig, Variant};
pub use experiment::{artifact_stem, run_experiment, run_trial, summarize, ExperimentReport, GroupSummary};
pub use pipeline::{extract_color_cycle, run_pipeline, ColorRecord, Outcome, PipelineOutput, TrialRecord};
pub use report::{
    emit_report, read_csv, read_json, records_to_rows, summarize_csv, write_csv, write_json, CsvRow, ReportFormat,
    CSV_COLUMNS, SCHEMA_VERSION,
};
