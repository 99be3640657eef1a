//! Configuration loading, parameter sweeps and CSV output for the `hetnet`
//! binary.

pub mod config;
pub mod output;
pub mod sweep;

use std::path::PathBuf;

use hetnet_core::Violations;
use thiserror::Error;

pub use config::{
    db_to_linear, linear_to_db, load_config, parse_config, Config, MethodName, SimSettings, SweepSpec, SweepVariable,
};
pub use output::write_csv;
pub use sweep::{run_sweep, Metric, OutputRow, RunOptions, SweepPoint, SweepTable};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}", path = path.display())]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot parse configuration: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("invalid configuration: {0}")]
    Invalid(Violations),

    #[error(transparent)]
    Numerical(#[from] hetnet_core::Error),

    #[error("cannot write output: {0}")]
    Output(#[from] csv::Error),
}

impl CliError {
    /// 1 for problems with the input, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(hetnet_core::Error::Invalid(_) | hetnet_core::Error::NotRayleigh { .. }) => 1,
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }
}
