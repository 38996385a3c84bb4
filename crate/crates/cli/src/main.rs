mod args;
mod commands;
mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use exstat::Error;
use serde_json::{json, Map, Value};

use args::{Cli, Command, Format};
use output::Report;

/// Exit codes: 0 success, 2 validation, 3 numerical failure.
fn exit_code(e: &Error) -> u8 {
    if e.is_validation() {
        2
    } else {
        3
    }
}

fn report_error(e: &Error) -> ExitCode {
    let obj = json!({ "error": e.name(), "message": e.to_string() });
    eprintln!("{obj}");
    ExitCode::from(exit_code(e))
}

fn run(cli: Cli) -> Result<(), Error> {
    let command = cli
        .command
        .ok_or_else(|| Error::InvalidInput("no command given".into()))?;
    let workers = match cli.workers {
        Some(0) => return Err(Error::InvalidInput("workers must be at least 1".into())),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let format = cli.format.unwrap_or(match command {
        Command::Geometry(_) => Format::Json,
        _ => Format::Csv,
    });

    let mut config = Map::new();
    config.insert("command".into(), command.name().into());
    config.insert("seed".into(), cli.seed.into());
    config.insert("workers".into(), workers.into());
    config.insert("format".into(), serde_json::to_value(format).unwrap_or(Value::Null));
    let ctx = commands::Context {
        seed: cli.seed,
        workers,
    };
    let table = commands::run(&command, &mut config, &ctx)?;

    // render fully before touching the destination, so failures leave no partial file
    let report = Report {
        config,
        table,
        seed: cli.seed,
    };
    let mut buf = Vec::new();
    report.write(format, &mut buf).map_err(io_error)?;
    match cli.output {
        Some(path) => std::fs::write(&path, &buf)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout().lock().write_all(&buf).map_err(io_error),
    }
}

fn io_error(e: std::io::Error) -> Error {
    Error::InvalidInput(format!("output: {e}"))
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => return report_error(&e),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            _ => {
                let _ = e.print();
                let detail = e.to_string();
                let first = detail.lines().next().unwrap_or_default().trim_start_matches("error: ");
                return report_error(&Error::InvalidInput(first.to_string()));
            }
        },
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(&e),
    }
}
