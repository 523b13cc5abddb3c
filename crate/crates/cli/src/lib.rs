//! Library behind the `gcor` command-line tool: argument definitions,
//! CSV ingestion, subcommand drivers and SVG heatmaps.

pub mod args;
pub mod commands;
pub mod error;
pub mod input;
pub mod svg;

pub use args::Cli;
pub use commands::run;
pub use error::{CliError, CliResult, EXIT_USAGE};

/// Environment variable capping the worker thread count (`0` or unset: automatic).
pub const THREADS_ENV: &str = "GCOR_THREADS";

/// Configures the global thread pool from [`THREADS_ENV`].
pub fn init_threads() -> CliResult<()> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| CliError::Parse(format!("{THREADS_ENV}=`{v}` is not a non-negative integer")))?,
        Err(_) => 0,
    };
    // a pool that is already initialised keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}
