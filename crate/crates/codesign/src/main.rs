use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use codesign::{cmd_eval, cmd_pareto, cmd_report, cmd_search, load_config, CliError, Overrides};

/// Joint CNN cell and FPGA accelerator search.
#[derive(Parser)]
#[command(name = "codesign", version)]
struct Cli {
    /// Run configuration file (flat `key = value`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Evaluation worker threads.
    #[arg(long, global = true)]
    parallelism: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured search strategy.
    Search,
    /// Enumerate a sampled joint space and export its Pareto frontier.
    Pareto,
    /// Evaluate one point given as `cell=<edges>:<ops> hw=<8 values>`.
    Eval { point: String },
    /// Turn a run's step log into plot-ready CSVs.
    Report {
        /// Run directory; defaults to the output directory.
        dir: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let overrides = Overrides { seed: cli.seed, parallelism: cli.parallelism, out: cli.out };
    let cfg = load_config(cli.config.as_deref(), &overrides)?;
    match cli.command {
        Command::Search => print!("{}", cmd_search(&cfg)?),
        Command::Pareto => print!("{}", cmd_pareto(&cfg)?.to_text()),
        Command::Eval { point } => print!("{}", cmd_eval(&cfg, &point)?),
        Command::Report { dir } => {
            let dir = dir.unwrap_or_else(|| cfg.out.clone());
            let n = cmd_report(&cfg, &dir)?;
            println!("report: {n} steps -> {}", dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
