use std::process::ExitCode;

use clap::Parser;

use stochcuts_cli::{dispatch, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
