//! Files, configuration and the `wlab` command line on top of
//! [`weierstrass_core`].
//!
//! Output formats:
//!
//! - CSV tables with a header row, `\n` line endings and reals printed with
//!   17 significant digits;
//! - NDJSON experiment logs, one record per line with keys in a fixed order;
//! - binary PGM (`P5`) and PPM (`P6`) rasters.
//!
//! Exit codes: 0 on success, 2 for rejected configuration, 3 when a numerical
//! precondition fails, 4 for I/O errors.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

use clap::Parser;

pub use error::{LabError, Result};

/// Parses `argv`, runs the command on a pool of `--threads` workers and
/// writes its artifacts. Returns the summary line(s) for stderr.
pub fn run<I, T>(argv: I) -> Result<String>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = cli::Cli::try_parse_from(argv).map_err(|e| LabError::Config(e.to_string()))?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        config::require(n >= 1, "threads", "must be >= 1")?;
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| LabError::config("threads", e))?;
    let outcome = pool.install(|| commands::dispatch(&cli.command))?;
    for a in &outcome.artifacts {
        formats::emit(a.path.as_deref(), &a.bytes)?;
    }
    Ok(outcome.summary)
}
