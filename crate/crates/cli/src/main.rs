//! `cryptogen`: run capacity tables, protocol checks, leakage experiments,
//! game evaluations and embeddings from JSON inputs.
//!
//! Exit codes: 0 on success, 1 when a run fails (an error record is still
//! written), 2 when the input is rejected (nothing is written).

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{CapacityArgs, DecodeArgs, EmbedArgs, GameArgs, LeakArgs, Overrides, VerifyArgs};
use report::{emit, render_csv, render_json, CliError, RunConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "cryptogen", version, about = "Hidden-origin leakage toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Base seed; per-trial seeds are derived from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Enumeration budget, symbol budget, or round budget, depending on the command.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Capacity of the independent and fixed-count leaker models.
    Capacity(CapacityArgs),
    /// Suspicion certificates and safety scan of a protocol.
    Verify(VerifyArgs),
    /// Random-code leakage experiment.
    Leak(LeakArgs),
    /// Exact group win probability of protocols.
    Game(GameArgs),
    /// Run a protocol hidden inside innocent chatter.
    Embed(EmbedArgs),
    /// Read an embedded protocol transcript off innocent chatter.
    Decode(DecodeArgs),
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let o = Overrides {
        seed: cli.seed,
        trials: cli.trials,
        budget: cli.budget,
    };
    let (name, params) = match &cli.command {
        Command::Capacity(a) => ("capacity", serde_json::to_value(a)),
        Command::Verify(a) => ("verify", serde_json::to_value(a)),
        Command::Leak(a) => ("leak", serde_json::to_value(a)),
        Command::Game(a) => ("game", serde_json::to_value(a)),
        Command::Embed(a) => ("embed", serde_json::to_value(a)),
        Command::Decode(a) => ("decode", serde_json::to_value(a)),
    };
    let mut cfg = RunConfig::new(
        name,
        serde_json::json!({ "args": params.expect("arguments serialize"), "overrides": o }),
    );
    let out = match &cli.command {
        Command::Capacity(a) => commands::capacity(a, &mut cfg),
        Command::Verify(a) => commands::verify(a, &mut cfg, o),
        Command::Leak(a) => commands::leak(a, &mut cfg, o),
        Command::Game(a) => commands::game(a, &mut cfg, o),
        Command::Embed(a) => commands::embed(a, &mut cfg, o),
        Command::Decode(a) => commands::decode(a, &mut cfg),
    };
    match out {
        Ok(out) => {
            let bytes = match cli.format {
                Format::Json => render_json(&cfg, Some(&out.result), None),
                Format::Csv => render_csv(&cfg, &out.table)?,
            };
            emit(cli.out.as_ref(), &bytes)
        }
        Err(e @ CliError::Runtime(_)) => {
            emit(cli.out.as_ref(), &render_json(&cfg, None, Some(&e.to_string())))?;
            Err(e)
        }
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
