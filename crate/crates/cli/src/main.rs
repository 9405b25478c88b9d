use clap::Parser;
use odesc_cli::Cli;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ODESC_LOG", "warn")).init();
    let cli = Cli::parse();
    std::process::exit(odesc_cli::run(cli));
}
