use clap::Parser;

fn main() {
    let cli = shearwave::cli::Cli::parse();
    std::process::exit(shearwave::cli::run(cli));
}
