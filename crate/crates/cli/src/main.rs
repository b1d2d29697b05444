use std::process::ExitCode;

use clap::Parser;
use nmqsd_cli::app::{self, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                app::EXIT_USAGE
            } else {
                app::EXIT_OK
            });
        }
    };
    ExitCode::from(app::run(cli))
}
