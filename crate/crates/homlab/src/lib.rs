//! # homlab
//!
//! Command-line front end for [`homlab_core`]: state descriptors, run
//! configuration, JSON/CSV output and parallel drivers for the grid, scan and
//! search workloads.
//!
//! Worker threads default to the number of cores; the `HOMLAB_THREADS`
//! environment variable caps them.

pub mod commands;
pub mod config;
pub mod descriptor;
pub mod error;
pub mod output;

use error::{CliError, CliResult};

/// Thread pool honouring `HOMLAB_THREADS`.
pub fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("HOMLAB_THREADS") {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::usage(format!("HOMLAB_THREADS: expected a positive integer, got '{raw}'")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::usage(format!("HOMLAB_THREADS: {e}")))
}
