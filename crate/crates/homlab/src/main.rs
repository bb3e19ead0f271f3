use std::process::ExitCode;

use clap::Parser;
use homlab::config::{resolve, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = resolve(cli).and_then(|cmd| homlab::thread_pool()?.install(|| homlab::commands::run(&cmd)));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("homlab: {e}");
            e.exit_code()
        }
    }
}
