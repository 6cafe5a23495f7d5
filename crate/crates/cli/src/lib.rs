//! Experiment harness on top of the `gefair` library: CSV ingestion with
//! one-hot encoding and seeded splits, single runs and grid sweeps of the
//! entropy-constrained solver, Monte-Carlo bound validation, and a
//! metrics-only audit mode.

pub mod audit;
pub mod dataset;
pub mod presets;
pub mod run;
pub mod sweep;
pub mod synth;
pub mod validate;

pub use audit::{audit, load_predictions, AuditReport, AuditSpec};
pub use dataset::{load_dataset, split_indices, DatasetSpec, LoadedDataset};
pub use run::{run_on_loaded, run_single, EvalConfig, RunOutput, RunRecord};
pub use sweep::{
    read_sweep_csv, run_sweep, run_sweep_on_loaded, write_summary_csv, write_sweep_csv,
    write_trace_csv, CellResult, CellSummary, SolverSettings, SweepConfig, SweepOutcome, SweepRow,
    TrendReport,
};
pub use validate::{
    standard_distribution, validate_bounds, AlphaValidation, BoundValidationConfig,
    BoundValidationReport,
};
