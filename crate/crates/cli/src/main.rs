use clap::Parser;
use iontrap_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("iontrap: error: {e}");
        std::process::exit(e.code);
    }
}
