use clap::Parser;

fn main() {
    let code = nls_ground_cli::run(nls_ground_cli::Cli::parse());
    std::process::exit(code);
}
