//! Configuration, command orchestration, and artifact emission for the
//! `flowspectra` binary.

pub mod commands;
pub mod config;
pub mod expr;
pub mod json;
pub mod plot;

pub use commands::{
    cmd_evolve, cmd_oracle_sphere, cmd_plot, cmd_verify, EXIT_ERROR, EXIT_OK, EXIT_TRUNCATED,
    EXIT_VERIFY_FAILED,
};
pub use config::{ExperimentConfig, GeometrySpec, WeightSpec};
