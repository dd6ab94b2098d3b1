//! Command-line front end: builds states, writes distributions, marginals, expectation
//! values and evolutions as CSV and JSON, and runs the verification suite.

pub mod args;
pub mod commands;
pub mod csvio;
pub mod error;
pub mod lists;
pub mod manifest;

use clap::Parser;

pub use args::Cli;
pub use error::{CliError, EXIT_CHECK, EXIT_GUARD, EXIT_OK, EXIT_USAGE};

/// Parses `argv`, runs the command, prints its output, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match commands::execute(&cli) {
        Ok(stdout) => {
            print!("{stdout}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
