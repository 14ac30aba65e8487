//! Experiment harness: config, runs of the three methods, and report output.

mod config;
mod emit;
mod report;
mod run;

pub use config::{apply_override, parse_methods, DatasetConfig, ExperimentConfig, Method, Scaling};
pub use emit::{render, Format};
pub use report::{BroadcastReport, DatasetSummary, ExperimentReport, MethodReport, MethodStatus, RunMode, SiteReport, TIME_UNIT};
pub use run::{cmd_run, fixture_report, load_dataset, median, run_fixture, run_on_dataset};

use crate::error::Error;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(#[source] Error),
    /// Every requested method failed; the report still lists each failure.
    #[error("every requested method failed")]
    AllMethodsFailed(Box<ExperimentReport>),
}

impl RunError {
    /// Process exit status for the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Data(_) => 2,
            RunError::AllMethodsFailed(_) => 3,
        }
    }
}
