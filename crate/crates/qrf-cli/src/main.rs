mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use qrf::QrfError;

use args::{Cli, Format};
use commands::CliError;

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Usage(_) | CliError::Io(_) => 2,
        CliError::Qrf(
            QrfError::InvalidArgument(_)
            | QrfError::DimensionMismatch(_)
            | QrfError::InvalidState(_)
            | QrfError::UnsupportedGroup(_)
            | QrfError::Json(_),
        ) => 2,
        CliError::Qrf(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let report = match commands::run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Some(path) = &cli.out {
        let Some(table) = &report.table else {
            eprintln!("error: this command produces no series for --out");
            return ExitCode::from(2);
        };
        if let Err(e) = table.write_path(path) {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let written = match cli.format {
        Format::Json => {
            let text = serde_json::to_string_pretty(&output::round_json(report.json)).expect("valid JSON");
            writeln!(lock, "{text}").map_err(|e| e.to_string())
        }
        Format::Csv => match &report.table {
            Some(t) => t.write(&mut lock).map_err(|e| e.to_string()),
            None => {
                eprintln!("error: this command produces no series for --format csv");
                return ExitCode::from(2);
            }
        },
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
