//! Config-driven experiments: load, run, summarize and write outputs.

mod config;
mod io;
mod presets;
mod report;

pub use config::{
    DiagnosticToggles, Experiment, ExperimentConfig, ModelSpec, Overrides, PlanSpec, DEFAULT_ALPHA,
    DEFAULT_ALPHA_A, DEFAULT_ETA,
};
pub use io::{
    read_chain_jsonl, read_compare_csv, read_eigenvalues_csv, read_json, read_routes_csv,
    read_sweep_csv, write_chain_jsonl, write_compare_csv, write_eigenvalues_csv, write_json,
    write_routes_csv, write_sweep_csv, COMPARE_HEADER,
};
pub use presets::{Preset, PRESETS};
pub use report::{
    compare, oracle_check, run_experiment, summarize, sweep, write_run, ChainStats, CheckResult,
    CompareRow, EigenSummary, Manifest, ModeFrequency, OracleReport, RmseSummary, RouteReport,
    RunOutcome, SummaryReport, SweepParam, SweepRow, Timing,
};
