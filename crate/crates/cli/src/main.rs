//! `protocx`: build, iterate and inspect protocol complexes.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "protocx",
    version,
    about = "Protocol complexes as chromatic semi-simplicial sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// One round of the protocol over an input complex.
    Build {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Rounds 0..=n of the free algebra with the next-state projections.
    Iterate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        rounds: usize,
        /// `dot` renders the last round only.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Evaluate a formula, or run the randomized axiom harness.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        /// Formula text, e.g. `K[a] (alive(b) -> in1@b)`.
        #[arg(long, required_unless_present = "axioms")]
        formula: Option<String>,
        /// Round of the evaluation world.
        #[arg(long, default_value_t = 0)]
        round: usize,
        /// World id; all worlds of the round when omitted.
        #[arg(long)]
        world: Option<usize>,
        /// Number of materialized rounds; at least `--round`.
        #[arg(long, default_value_t = 1)]
        horizon: usize,
        /// Run the axiom-soundness harness instead of a formula.
        #[arg(long, conflicts_with = "formula")]
        axioms: bool,
        /// Instantiations per axiom for `--axioms`.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for a decision map solving a task after some rounds.
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        /// Task file, `consensus:<n>`, or `identity` (uses `--input`).
        #[arg(long)]
        task: String,
        #[arg(long, default_value_t = 0)]
        rounds: usize,
    },
    /// GF(2) Betti numbers of the input, or of a round of the protocol.
    Betti {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        rounds: usize,
    },
    /// Level-by-level simplex counts for rounds 0..=n.
    Stats {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// `immediate_snapshot`, `reliable_broadcast`, `sync_broadcast`, or an
    /// adversary JSON file.
    #[arg(long, default_value = "immediate_snapshot")]
    pub adversary: String,
    /// Detectable crashes for `sync_broadcast`.
    #[arg(long)]
    pub detectable: bool,
    /// Crash budget applied to the adversary.
    #[arg(long)]
    pub k: Option<usize>,
    /// Input complex: cset JSON file, `simplex:a,b,c`, `glued2:a,b,c@b,c`
    /// or `binary:a,b`.
    #[arg(long, default_value = "simplex:a,b,c")]
    pub input: String,
    /// Largest round, in simplices, that may be materialized.
    #[arg(long, env = "PROTOCX_BUDGET", default_value_t = 2_000_000)]
    pub budget: usize,
    /// Decorate rounds with decision values.
    #[arg(long, value_enum, default_value_t = Protocol::None)]
    pub protocol: Protocol,
    /// Averaging weight as a rational `p/q`.
    #[arg(long, default_value = "1/2")]
    pub alpha: String,
    /// Initial values per agent, e.g. `a=0,b=1`, for inputs without values.
    #[arg(long)]
    pub values: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    None,
    Averaging,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("protocx: {}", e);
            ExitCode::from(e.exit_code())
        }
    }
}
