use clap::Parser;
use fif::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = run(&cli.command, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
