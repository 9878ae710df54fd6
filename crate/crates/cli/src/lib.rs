//! Command-line harness for `so3_track`: configuration files, single and
//! batch runs, trajectory CSVs, reports and SVG plots.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod runner;

pub use config::{parse_config, parse_config_str, Overrides, RunConfig};
pub use error::{CliError, ConfigError};
pub use runner::{batch, execute, run, BatchSummary};
