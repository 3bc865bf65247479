//! Command-line front end: argument parsing, output formats and the preset
//! experiments behind `tlom reproduce`.
//!
//! Exit codes are 0 for success, 1 when a verdict fails or a computation
//! cannot complete, and 2 for invalid arguments.

pub mod args;
pub mod commands;
pub mod output;
pub mod reproduce;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Why a command did not finish normally.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or values; exit 2.
    Usage(String),
    /// The computation itself failed; exit 1.
    Compute(String),
    /// Output could not be written.
    Io(std::io::Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<tlom_core::Error> for Failure {
    fn from(e: tlom_core::Error) -> Self {
        use tlom_core::Error as E;
        match e {
            E::NotAbsorbed { .. } | E::ProbabilityOutOfRange { .. } | E::Residual { .. } => {
                Failure::Compute(e.to_string())
            }
            e => Failure::Usage(e.to_string()),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = writeln!(err, "{}", one_line(&e.render().to_string()));
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Estimate(a) => commands::estimate(&a, out),
        Command::Exact(a) => commands::exact(&a, out),
        Command::Verify(a) => commands::verify(&a, out),
        Command::Scaling(a) => commands::scaling(&a, out),
        Command::Trace(a) => commands::trace(&a, out),
        Command::Reproduce(a) => commands::reproduce(&a, out),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Compute(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_FAILED
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILED
        }
    }
}

/// Collapses a clap diagnostic to its first paragraph on one line.
fn one_line(rendered: &str) -> String {
    rendered
        .lines()
        .map(str::trim)
        .take_while(|l| !l.is_empty() && !l.starts_with("Usage:"))
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagnostics_collapse_to_one_line() {
        let s = "error: the following required arguments were not provided:\n  --n <N>\n\nUsage: tlom estimate\n";
        assert_eq!(
            one_line(s),
            "error: the following required arguments were not provided: --n <N>"
        );
    }
}
