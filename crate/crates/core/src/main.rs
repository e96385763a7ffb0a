use clap::Parser;

fn main() {
    let cli = contractum::cli::Cli::parse();
    std::process::exit(contractum::cli::main_entry(cli));
}
