use clap::Parser;
use ghk_core::cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(f) = execute(&cli) {
        match &f {
            ghk_core::cli::Failure::Usage(m) | ghk_core::cli::Failure::Check(m) => eprintln!("ghk: {m}"),
        }
        std::process::exit(f.exit_code());
    }
}
