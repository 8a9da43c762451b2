//! Batch experiments: configuration, replica ensembles, threshold search,
//! CSV output and figure presets.

pub mod config;
pub mod ensemble;
pub mod output;
pub mod presets;
pub mod threshold;

pub use config::{network_rng, replica_rng, workers_from_env, ExperimentConfig, NetworkSource, WORKERS_ENV};
pub use ensemble::{
    mean_and_stderr, run_ensemble, run_ensemble_config, EnsembleReport, EnsembleSpec, ReplicaSummary,
    SeasonAggregate,
};
pub use output::{emit_csv, read_csv, write_csv, write_recurrence_csv, ReportRow, REPORT_COLUMNS};
pub use presets::{run_preset, Preset, PresetOptions};
pub use threshold::{estimate_threshold, Probe, ThresholdEstimate, ThresholdSpec};
