use clap::Parser;

use mmwave_crlb::harness::cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    std::process::exit(execute(&cli));
}
