mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Expand(a) => commands::expand(a),
        Command::Simulate(a) => commands::simulate_cmd(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Implied(a) => commands::implied(a),
    };
    let out = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            return ExitCode::from(1);
        }
    };
    let text = match out.render(cli.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: Io: {e}");
            return ExitCode::from(1);
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: Io: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
