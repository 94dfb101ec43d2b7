//! `bellharness` command-line front end.
//!
//! Exit codes: 0 success, 1 failed check or I/O error, 2 usage, 3 protocol
//! violation, 4 timeout.

mod args;
mod commands;
mod error;
mod render;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(a, json),
        Command::Spectrum(a) => commands::spectrum(a, json),
        Command::Certificate(a) => commands::certificate(a, json),
        Command::Chsh(a) => commands::chsh(a, json),
        Command::Fine(a) => commands::fine(a, json),
        Command::Boole(a) => commands::boole(a, json),
        Command::Serve(a) => commands::serve(a, json),
        Command::Station(a) => commands::station(a, json),
        Command::Replay(a) => commands::replay(a, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
