//! Configuration and orchestration for the `fracsep` command-line tool.

pub mod config;
pub mod run;

pub use config::{parse_config, ConfigError, ExperimentConfig};
pub use run::{output_dir, Command, Run, RunError};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "FRACSEP_OUT";
