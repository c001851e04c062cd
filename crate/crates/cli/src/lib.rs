pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod runner;

pub use config::{parse_config, RunConfig};
pub use error::{CliError, Result};

use std::path::Path;

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}
