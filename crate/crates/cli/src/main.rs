use std::fs;
use std::process::ExitCode;

use clap::Parser;
use limcov_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let output = match run(&cli) {
        Ok(output) => output,
        Err(e) => {
            eprintln!("limcov: {e}");
            return ExitCode::from(2);
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &output.text) {
                eprintln!("limcov: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{}", output.text),
    }
    ExitCode::from(if output.passed { 0 } else { 1 })
}
