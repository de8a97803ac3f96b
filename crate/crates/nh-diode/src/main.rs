use std::process::ExitCode;

use clap::Parser;
use nh_diode::cli::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                nh_diode::EXIT_USAGE
            } else {
                nh_diode::EXIT_OK
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match nh_diode::run(&cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(nh_diode::exit_code(&e))
        }
    }
}
