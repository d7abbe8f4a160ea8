mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};

use commands::{CliError, EntropyArgs, EvolveArgs, ExportArgs, TransmitArgs};
use config::GlobalArgs;

/// Temperley-Lieb projectors, braid matrices and spin chains of the SÔ(N)
/// and Sp̂(N) families.
#[derive(Debug, Parser)]
#[command(name = "tlspin", version, allow_negative_numbers = true)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Projector, braid and chain identity checks.
    Verify,
    /// Time evolution of a chain state.
    Evolve(EvolveArgs),
    /// Encode, evolve and decode on the six-site SÔ(3) chain.
    Transmit(TransmitArgs),
    /// Entanglement entropy of |Ψ⟩ against q.
    EntropyCurve(EntropyArgs),
    /// Loop constant, rapidity parameters, ρ-tuple and ε-signs.
    Info,
    /// Dense projector or chain operator as CSV or JSON.
    Export(ExportArgs),
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = config::resolve(&cli.global).map_err(CliError::Config)?;
    match &cli.command {
        Command::Verify => commands::verify(&cfg),
        Command::Evolve(a) => commands::evolve(&cfg, a),
        Command::Transmit(a) => commands::transmit(&cfg, a),
        Command::EntropyCurve(a) => commands::entropy(&cfg, a),
        Command::Info => commands::info(&cfg),
        Command::Export(a) => commands::export(&cfg, a),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        let kind = if e.code() == 2 { "configuration error" } else { "error" };
        eprintln!("tlspin: {kind}: {}", e.message());
        std::process::exit(e.code());
    }
}
