use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use bfmn_cli::error::CliError;
use bfmn_cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::validation("InvalidArguments", e.to_string().trim().to_string());
            eprintln!("{}", err.report());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    let result = catch_unwind(AssertUnwindSafe(|| run(cli)))
        .unwrap_or_else(|_| Err(CliError::Internal("unexpected panic".into())));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
