use std::process::ExitCode;

use clap::Parser;
use movcat::cli::{self, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    ExitCode::from(cli::run(&cli, &mut out) as u8)
}
