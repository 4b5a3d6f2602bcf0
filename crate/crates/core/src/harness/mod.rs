//! Experiment harness: configuration, seeded Monte Carlo runners and result
//! files.
//!
//! A run is described by an [`ExperimentSpec`], built from a JSON [`Config`]
//! plus command-line [`Overrides`]. [`run`] executes it in memory and
//! [`ExperimentOutput::write`] persists the result. Identical specs give
//! byte-identical files, whatever the thread count.

pub mod config;
pub mod experiments;
pub mod output;
pub mod stats;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{default_poses, Config, ExperimentSpec, Overrides, PoseConfig, DEFAULT_SNR_DB};
pub use experiments::{
    run, run_angle_sweep, run_antenna_sweep, run_ccdf, run_imi_demo, run_subcarrier_sweep, trial_seed, validate_model,
};
pub use output::{spec_hash, Curve, ExperimentOutput, ResultRow, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    AngleSweep,
    Ccdf,
    SubcarrierSweep,
    AntennaSweep,
    ImiDemo,
    ValidateModel,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::AngleSweep => "angle-sweep",
            ExperimentKind::Ccdf => "ccdf",
            ExperimentKind::SubcarrierSweep => "subcarrier-sweep",
            ExperimentKind::AntennaSweep => "antenna-sweep",
            ExperimentKind::ImiDemo => "imi-demo",
            ExperimentKind::ValidateModel => "validate-model",
        }
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    /// The configuration is unreadable, malformed or inconsistent.
    #[error("config error: {0}")]
    Config(String),
    /// Simulation or processing failed while running.
    #[error("runtime error: {0}")]
    Runtime(#[from] crate::Error),
    #[error("output error: {0}")]
    Io(String),
}

impl HarnessError {
    /// Process exit code: 2 for configuration problems, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Runtime(_) | HarnessError::Io(_) => 3,
        }
    }
}
