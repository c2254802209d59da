//! Scenario plumbing: TOML configs, named presets, the parallel runner and
//! the design report.

mod config;
mod presets;
mod report;
mod runner;

pub use config::{
    ControlConfig, DesignConfig, DynamicsConfig, ExperimentConfig, InitialCondition, MuSource, NormConfig, Resolved,
    ResolvedStart, SimulationConfig, SystemConfig, SystemInstance, SCHEMA_VERSION,
};
pub use presets::{preset, PRESET_NAMES};
pub use report::{BallDesign, DesignReport, ExperimentReport, RunSummary};
pub use runner::{design_report, run_experiment, ExperimentOutput, MU_COMPARE_SLACK};
