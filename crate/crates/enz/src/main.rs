use clap::Parser;

fn main() {
    let cli = enz::cli::Cli::parse();
    if let Err(err) = enz::cli::run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
