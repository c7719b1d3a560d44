//! `lindblad-bench`: Roofline tables, kernel timings, pulse-chain timings,
//! state validation and operator dumps for Lindblad propagation.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli).and_then(|report| report.write(cli.common.output.as_deref())) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(output::EXIT_INPUT)
        }
    }
}
