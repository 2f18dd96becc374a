//! Config-driven experiment runner for `rwre-core`.
//!
//! A run reads one JSON config, executes the named experiment on a worker
//! pool and persists a result directory (see [`result`]).

pub mod config;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod formats;
pub mod result;

use std::path::PathBuf;

pub use config::{ExperimentConfig, ExperimentId, Overrides};
pub use error::{LabError, Result};
pub use result::ExperimentOutput;

pub const OUTPUT_DIR_VAR: &str = "RWRE_LAB_OUTPUT_DIR";
pub const WORKERS_VAR: &str = "RWRE_LAB_WORKERS";

/// Run the configured experiment and persist its result directory.
pub fn run(cfg: &ExperimentConfig) -> Result<(PathBuf, ExperimentOutput)> {
    let pool = exec::Pool::new(cfg.workers);
    let output = experiments::run(cfg, &pool)?;
    let dir = result::write_result(cfg, &output)?;
    Ok((dir, output))
}
