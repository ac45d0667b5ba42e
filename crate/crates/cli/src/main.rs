mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::{CliError, Run};

fn dispatch(cli: &Cli) -> Result<Run, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Audit(a) => commands::audit(g, a),
        Command::Spectrum(s) => commands::spectrum(g, s),
        Command::Coherent(c) => commands::coherent(g, c),
        Command::Su2(s) => commands::su2(g, s),
        Command::Eval(e) => commands::eval(g, e),
        Command::ArcsinAudit => commands::arcsin_audit(g),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Some(tol) = cli.global.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            eprintln!("error: --tol must be a positive finite number");
            return ExitCode::from(1);
        }
    }
    let run = match dispatch(&cli) {
        Ok(r) => r,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let written = match &cli.global.output {
        Some(path) => std::fs::write(path, run.body.as_bytes()),
        None => std::io::stdout().write_all(run.body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    match run.violation {
        Some(v) => {
            eprintln!("{}", serde_json::to_string(&v).expect("diagnostic serializes"));
            ExitCode::from(2)
        }
        None => ExitCode::SUCCESS,
    }
}
