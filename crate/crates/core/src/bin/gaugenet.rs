//! Scenario-driven command-line front end. Exit codes: 0 all checks pass,
//! 1 a gated check exceeded its tolerance, 2 usage or configuration error,
//! 3 numeric failure (singular frames, failed frequency assignment,
//! non-finite trajectories).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gaugenet::commands::{cmd_circuit, cmd_evolve, cmd_map, cmd_verify, RunOptions};
use gaugenet::error::{EXIT_PASS, EXIT_TOLERANCE};
use gaugenet::report::Report;
use gaugenet::scenario::Scenario;
use gaugenet::Result;

#[derive(Parser)]
#[command(
    name = "gaugenet",
    version,
    about = "Gauge-equivalence toolkit: connector frames, state evolution, \
             circuit synthesis and invariant verification for scenario files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario configuration file (JSON).
    #[arg(long)]
    config: PathBuf,

    /// Output directory; overrides the scenario's output_dir.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Seed for randomized checks; overrides the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Grid step-count override (must be at least 2).
    #[arg(long)]
    steps: Option<usize>,
}

impl RunArgs {
    fn options(&self) -> RunOptions {
        RunOptions { out_dir: self.out.clone(), seed: self.seed, steps: self.steps }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve the connector frame for the scenario's source/target pair and
    /// write the frame plus the mapped generator samples.
    Map(RunArgs),
    /// Integrate the source generator from the configured initial state and
    /// write the state trajectory.
    Evolve(RunArgs),
    /// Realify a constant Hermitian source, synthesize the port network,
    /// emit its netlist and simulate the voltage tracks.
    Circuit(RunArgs),
    /// Run the full invariant suite (intertwining, group laws, equivalence
    /// witnesses, transport, conjugation, realification agreement).
    Verify(RunArgs),
}

fn run(cmd: &Command) -> Result<Report> {
    let args = match cmd {
        Command::Map(a) | Command::Evolve(a) | Command::Circuit(a) | Command::Verify(a) => a,
    };
    let scenario = Scenario::load(&args.config)?;
    let opts = args.options();
    match cmd {
        Command::Map(_) => cmd_map(&scenario, &opts),
        Command::Evolve(_) => cmd_evolve(&scenario, &opts),
        Command::Circuit(_) => cmd_circuit(&scenario, &opts),
        Command::Verify(_) => cmd_verify(&scenario, &opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(report) => {
            print!("{}", report.to_text());
            let code = if report.overall_pass { EXIT_PASS } else { EXIT_TOLERANCE };
            ExitCode::from(code as u8)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
