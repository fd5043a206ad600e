//! Scenario runner behind the `fratio` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod scenario;

pub use config::{parse_config, ScenarioConfig};
pub use error::CliError;
pub use scenario::{ks_command, run_scenario};
