//! Command-line driver: parses a run configuration, executes one scenario
//! and writes CSV results plus a `manifest.json` that reproduces the run.

pub mod config;
mod error;
pub mod run;

use std::fs;
use std::path::PathBuf;

use clap::Parser;

pub use config::{parse_config, ExperimentConfig, Overrides, RunConfig, Scenario, Threads};
pub use error::{CliError, Result};
pub use run::{run, Manifest, UnitRecord, MANIFEST_FILE};

#[derive(Debug, Parser)]
#[command(
    name = "cocontagion",
    version,
    about = "Simulate two interacting contagions on multiplex networks"
)]
pub struct Args {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// single_trial, tau_grid, beta_sweep, synergy, long_short or speed_order.
    #[arg(long, value_name = "NAME")]
    pub scenario: Option<String>,
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Trials per sweep cell.
    #[arg(long, value_name = "N")]
    pub trials: Option<usize>,
    /// Worker threads, or `auto`.
    #[arg(long, value_name = "N|auto")]
    pub threads: Option<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Override any config key, e.g. `--set params.tau_a=0.1`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl Args {
    /// Reads the config file, if any, and applies the flags on top of it.
    pub fn to_config(&self) -> Result<RunConfig> {
        let text = match &self.config {
            Some(path) => Some(fs::read_to_string(path).map_err(|source| CliError::Read {
                path: path.clone(),
                source,
            })?),
            None => None,
        };
        let overrides = Overrides {
            scenario: self.scenario.clone(),
            seed: self.seed,
            trials: self.trials,
            threads: self.threads.clone(),
            out: self.out.clone(),
            set: self.set.clone(),
        };
        parse_config(text.as_deref(), &overrides)
    }
}
