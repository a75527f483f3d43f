mod args;
mod check;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let help = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            return ExitCode::from(if help { 0 } else { 1 });
        }
    };
    let result = match cli.command {
        Command::Bifurcate(a) => commands::bifurcate(&a),
        Command::Cycle(a) => commands::cycle(&a),
        Command::Density(a) => commands::density(&a),
        Command::Bands(a) => commands::bands(&a),
        Command::Ortho(a) => commands::ortho(&a),
        Command::Check => check::run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bandmap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
