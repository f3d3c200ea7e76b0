mod cli;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::cli::RunConfig;
use crate::commands::{run, Outcome};

/// Failures that end a run with exit status 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] harmonic_core::Error),

    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

const EXIT_USAGE: u8 = 1;
const EXIT_REJECTED: u8 = 2;

/// Sizes the global pool from `HARMONIC_THREADS`; 0 or unset means one
/// thread per core.
fn configure_threads() -> Result<(), CliError> {
    let threads = match std::env::var("HARMONIC_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("HARMONIC_THREADS=`{v}` is not a non-negative integer")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or_default();
            eprintln!("E{EXIT_USAGE}: {}", first.trim_start_matches("error: "));
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result = configure_threads().and_then(|_| run(&config));
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Rejected(why)) => {
            eprintln!("E{EXIT_REJECTED}: {why}");
            ExitCode::from(EXIT_REJECTED)
        }
        Err(e) => {
            eprintln!("E{EXIT_USAGE}: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
