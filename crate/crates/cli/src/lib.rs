//! Scenario runner for MISR and SIR-gain experiments: configuration,
//! artifact writers and the built-in validation suite.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod validation;

pub use config::RunConfig;
pub use error::{CliError, Result};
pub use run::run;

use misr_core::simkernel::Engine;

/// The only environment input: number of worker threads (0 or unset means
/// one per core). Results never depend on it.
pub const WORKERS_ENV: &str = "MISR_WORKERS";

pub fn engine_from_env() -> Result<Engine> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(Engine::default()),
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{WORKERS_ENV} must be a non-negative integer, got `{v}`")))?;
            Ok(Engine::with_workers((n > 0).then_some(n)))
        }
    }
}
