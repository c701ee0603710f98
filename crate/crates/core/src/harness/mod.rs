//! Experiment configuration, orchestration, RMSE reporting, CSV output and
//! the command-line driver.

mod cli;
mod compare;
mod config;
mod csv;
mod rmse;
mod verify;

pub use cli::{cli_main, run_cli, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE};
pub use compare::{
    estimate_table, run_comparison, trajectory_table, write_comparison, Comparison, FilterKind, FilterRmse,
    RmseReport,
};
pub use config::{
    resolve_seed, ExperimentConfig, FilterChoice, ModelKind, SmibSetup, DEFAULT_NEAR_SWITCH_WINDOW, SEED_ENV,
};
pub use csv::{format_float, Row, TrajectoryTable};
pub use rmse::{near_switch_windows, rmse, Window};
pub use verify::{line1_tripped, run_verify, simulate_smib, VerifyOutcome};
