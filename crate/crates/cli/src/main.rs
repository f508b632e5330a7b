mod args;
mod commands;
mod error;
mod input;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use crate::args::Cli;
use crate::commands::{run, Rendered};
use crate::error::exit;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let name = cli.command.name();
    let result = run(&cli.command).and_then(|rendered| match rendered {
        Rendered::Report {
            output,
            format,
            dest,
        } => {
            let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            output::render(name, &output, elapsed_ms, format, dest.as_deref())?;
            Ok(output.exit_code)
        }
        Rendered::Done => Ok(exit::OK),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("momentmono {name}: {e}");
            ExitCode::from(e.code)
        }
    }
}
