use std::process::ExitCode;

use clap::Parser;
use dctensor_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dctensor: {e}");
            e.into()
        }
    }
}
