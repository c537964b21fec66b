//! Batch runner behind the `idealcalc` binary.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{default_config, ConfigError, ExperimentConfig, Format, SuiteConfig, SuiteName};
pub use report::{ExperimentReport, Record, Summary};

use rayon::prelude::*;

/// Runs every suite in `config`; records come back in canonical order.
pub fn run(config: &ExperimentConfig) -> ExperimentReport {
    let records = config
        .suites
        .par_iter()
        .flat_map_iter(suites::run_suite)
        .collect();
    ExperimentReport::from_records(records)
}

/// `IDEALCALC_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Result<Option<usize>, ConfigError> {
    match std::env::var("IDEALCALC_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ConfigError::Other(format!(
                "IDEALCALC_THREADS must be a positive integer, got `{v}`"
            ))),
        },
    }
}
