//! Command-line front end: flag and config parsing, experiment dispatch and
//! atomic CSV/JSON output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use clap::Parser;

pub use commands::Outcome;
pub use config::{Cli, ExperimentConfig};
pub use error::{CliError, CliResult};
pub use output::{emit_results, read_results, Cell, ColumnKind, Schema};

/// Resolves and runs one invocation inside a pool of the requested size.
pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    let cfg = config::resolve(cli)?;
    match cfg.workers {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {threads} workers: {e}")))?
            .install(|| commands::run(&cfg)),
        None => commands::run(&cfg),
    }
}

/// Parses `args` (program name first), runs, prints, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            if let Some(text) = outcome.stdout {
                print!("{text}");
                if !text.ends_with('\n') {
                    println!();
                }
            }
            println!("{}", outcome.summary);
            0
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            e.exit_code()
        }
    }
}
