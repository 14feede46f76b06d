use std::process::ExitCode;

use clap::Parser;
use nbarrier_cli::config::{Cli, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    match RunConfig::new(kind, args).and_then(|cfg| nbarrier_cli::run(&cfg)) {
        Ok(status) => ExitCode::from(status.code()),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
