//! Seeded Monte Carlo experiments, analytical sensitivity tables and
//! their CSV/JSON serialization.

pub mod emit;
pub mod experiment;
pub mod run;
pub mod tables;

pub use emit::{emit_contours, emit_records, emit_sensitivity, emit_sweeps, from_csv, to_csv, write_output, Format};
pub use experiment::{load_config, parse_config, Experiment, ExperimentFile, ExperimentKind, Preset};
pub use run::{run_sweep, run_trial, Outcome, PreparedExperiment, SweepResult, SweepRow, TrialOutcome};
pub use tables::{
    classify_stream, contour_table, cumulant_table, default_contour_grid, run_sensitivity, ClassificationRow, ClassifyMode, ContourRow,
    CumulantRow, SensitivityResult, SensitivityRow,
};
