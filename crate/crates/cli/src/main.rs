use clap::Parser;
use optsample_cli::commands::{self, Command};

/// Sampling-design construction and function recovery from samples.
///
/// `design` builds near-optimal points and weights with a spectral
/// certificate; `recover` runs one recovery method on a synthetic target;
/// `benchmark` and `rates` drive whole experiments from a JSON config;
/// `oracle` prints exact closed forms for the periodic Lipschitz class.
/// The environment variable OPTSAMPLE_SEED overrides any configured seed.
#[derive(Parser, Debug)]
#[command(name = "optsample", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Design(args) => commands::cmd_design(args),
        Command::Recover(args) => commands::cmd_recover(args),
        Command::Benchmark(args) => commands::cmd_benchmark(args),
        Command::Rates(args) => commands::cmd_rates(args),
        Command::Oracle(args) => commands::cmd_oracle(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(optsample_cli::exit_code_for(&err));
    }
}
