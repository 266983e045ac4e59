use clap::Parser;

fn main() {
    let cli = eitmem::cli::Cli::parse();
    if let Err(e) = eitmem::cli::run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
