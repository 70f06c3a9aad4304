use std::process::ExitCode;

use clap::Parser;

use otdcov_cli::args::{Cli, Command};
use otdcov_cli::{commands, configure_threads};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Test(a) => commands::test(&a),
        Command::NullTable(a) => commands::null_table(&a),
        Command::Grid(a) => commands::grid(&a),
        Command::Power(a) => commands::power(&a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("otdcov: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
