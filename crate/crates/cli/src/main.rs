//! `urn`: exact values, tables, simulation and recurrence tools for the
//! two-colour urn solitaire.
//!
//! Exit status: 0 on success, 1 on a domain error, 2 on a usage error,
//! 3 when a verification finds a nonzero residual.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = commands::run(&cli);
    let (payload, code) = match result {
        Ok(payload) => (Some(payload), 0),
        Err(CliError::VerificationFailed(payload)) => (Some(payload), 3),
        Err(e) => {
            eprintln!("error: {e}");
            (None, e.exit_code())
        }
    };
    if let Some(mut text) = payload {
        if !text.ends_with('\n') {
            text.push('\n');
        }
        let written = match &cli.out {
            Some(path) => std::fs::write(path, &text)
                .map_err(|e| format!("cannot write {}: {e}", path.display())),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| e.to_string()),
        };
        if let Err(e) = written {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code)
}
