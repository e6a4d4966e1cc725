//! Command-line front end: database generation and import, curve emission,
//! scene simulation, solving and point export.

mod args;
mod commands;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

pub use args::Cli;

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    /// Files written, in the order they were produced.
    pub artifacts: Vec<PathBuf>,
}

impl CommandOutcome {
    fn failed(exit_code: i32) -> Self {
        Self {
            exit_code,
            artifacts: Vec::new(),
        }
    }
}

/// Malformed or incomplete arguments that clap cannot catch on its own.
#[derive(Debug)]
pub(crate) struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub(crate) fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub const THREADS_ENV: &str = "SCATTER_SENSE_THREADS";

/// Parses `argv` (program name first) and executes the subcommand. Usage
/// errors exit with 2, domain errors with 1.
pub fn run<I, T>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return CommandOutcome::failed(code);
        }
    };
    match execute(cli) {
        Ok(artifacts) => CommandOutcome {
            exit_code: 0,
            artifacts,
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            CommandOutcome::failed(if e.is::<UsageError>() { 2 } else { 1 })
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<Vec<PathBuf>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(raw) = std::env::var_os(THREADS_ENV) {
        let n = raw
            .to_str()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .ok_or_else(|| usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    pool.install(|| commands::dispatch(cli))
}
