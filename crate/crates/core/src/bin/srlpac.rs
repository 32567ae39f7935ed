use clap::Parser;

fn main() {
    let cli = srlpac::cli::Cli::parse();
    if let Err(e) = srlpac::cli::run(cli) {
        eprintln!("error[{}]: {e}", e.exit_code());
        std::process::exit(e.exit_code());
    }
}
