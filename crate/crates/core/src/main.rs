use std::process::ExitCode;

use clap::Parser;
use mcpdist::cli::{exit_code, run, threads_from_env, Cli, EXIT_INVALID};
use mcpdist::exec::set_thread_count;
use mcpdist::Execution;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match threads_from_env() {
        Ok(Some(t)) => {
            set_thread_count(t);
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("mcpdist: {e}");
            return ExitCode::from(EXIT_INVALID as u8);
        }
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out, Execution::default()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("mcpdist: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
