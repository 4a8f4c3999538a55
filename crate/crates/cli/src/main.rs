use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nexus_cli::{cmd_run, cmd_sweep, cmd_validate, describe, RunConfig};
use nexus_core::fuzzy::MeasureKind;
use nexus_core::milp::SolverOptions;

#[derive(Parser)]
#[command(name = "nexus-plan", version, about = "Fuzzy-robust energy-water planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the profile and scenario files.
    Validate(Common),
    /// Expected total cost at one (alpha, gamma).
    Run(Common),
    /// Expected total cost over an (alpha, gamma) grid plus deterministic baselines.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    profile: PathBuf,
    #[arg(long)]
    scenarios: PathBuf,
    /// Confidence level; repeat for a sweep grid.
    #[arg(long = "alpha")]
    alphas: Vec<f64>,
    /// Robust budget; repeat for a sweep grid.
    #[arg(long = "gamma")]
    gammas: Vec<f64>,
    #[arg(long, default_value = "credibility", value_parser = parse_measure)]
    measure: MeasureKind,
    /// CSV output path (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reserved; the pipeline is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Solve through an MPS-reading program instead of the embedded solver.
    #[arg(long)]
    external_solver: Option<PathBuf>,
    /// Pivot budget per LP.
    #[arg(long, default_value_t = SolverOptions::default().max_pivots)]
    max_pivots: usize,
    /// Branch-and-bound node budget per MILP.
    #[arg(long, default_value_t = SolverOptions::default().max_nodes)]
    max_nodes: usize,
}

fn parse_measure(s: &str) -> Result<MeasureKind, String> {
    s.parse::<MeasureKind>().map_err(|e| e.to_string())
}

impl From<Common> for RunConfig {
    fn from(c: Common) -> Self {
        let mut config = RunConfig::new(c.profile, c.scenarios);
        config.alphas = c.alphas;
        config.gammas = c.gammas;
        config.measure = c.measure;
        config.out = c.out;
        config.external_solver = c.external_solver;
        config.solver.max_pivots = c.max_pivots;
        config.solver.max_nodes = c.max_nodes;
        config
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let result = match cli.command {
        Command::Validate(c) => cmd_validate(&c.into(), &mut stdout),
        Command::Run(c) => cmd_run(&c.into(), &mut stdout),
        Command::Sweep(c) => cmd_sweep(&c.into(), &mut stdout),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            for line in describe(&err) {
                eprintln!("{line}");
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
