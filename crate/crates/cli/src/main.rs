//! `mnac` — massive access channel analysis.
//!
//! Exit codes: 0 success, 2 configuration error, 3 search budget exceeded,
//! 4 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mnac_cli::{commands, runconfig};
use mnac_core::Error;

use runconfig::RunConfig;

#[derive(Parser)]
#[command(name = "mnac", version, about = "Capacity and identification limits of MIMO massive access channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat `key = value` config file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output CSV path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed (falls back to the config file, then MAL_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; affects speed only, never output bytes.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Monte Carlo trials per estimate.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Signature-length grid, `a:b:step` or comma list.
    #[arg(long = "n0-grid", global = true)]
    n0_grid: Option<String>,
    /// Block-length grid, `a:b:step` or comma list.
    #[arg(long = "n-grid", global = true)]
    n_grid: Option<String>,
    /// Receive-antenna grid, `a:b:step` or comma list.
    #[arg(long = "nr-grid", global = true)]
    nr_grid: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Identification thresholds, rates, and message-length capacities.
    Limits,
    /// Sum capacity and θ across block lengths and antenna counts.
    Figures,
    /// Empirical ML detection error across signature lengths.
    Detect,
    /// Density concentration tail against the Bernstein bound.
    Concentration,
    /// Successive decoding convergence diagnostics.
    Sic,
}

fn load_config(cli: &Cli) -> mnac_core::Result<runconfig::Resolved> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    if let Some(workers) = cli.workers {
        cfg.workers = Some(workers);
    }
    if let Some(trials) = cli.trials {
        cfg.trials = Some(trials);
    }
    if let Some(g) = &cli.n0_grid {
        cfg.n0_grid = Some(runconfig::parse_grid("n0-grid", g)?);
    }
    if let Some(g) = &cli.n_grid {
        cfg.n_grid = Some(runconfig::parse_grid("n-grid", g)?);
    }
    if let Some(g) = &cli.nr_grid {
        cfg.nr_grid = Some(runconfig::parse_grid("nr-grid", g)?);
    }
    cfg.resolve()
}

fn run(cli: &Cli) -> mnac_core::Result<()> {
    let resolved = load_config(cli)?;
    if resolved.workers > 0 {
        // ignore failure: the pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(resolved.workers).build_global();
    }
    let csv = match cli.command {
        Command::Limits => commands::cmd_limits(&resolved)?,
        Command::Figures => commands::cmd_figures(&resolved)?,
        Command::Detect => commands::cmd_detect(&resolved)?,
        Command::Concentration => commands::cmd_concentration(&resolved)?,
        Command::Sic => commands::cmd_sic(&resolved)?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mnac: {e}");
            match e {
                Error::InvalidArgument(_) => ExitCode::from(2),
                Error::BudgetExceeded { .. } => ExitCode::from(3),
                Error::Numerical(_) => ExitCode::from(4),
            }
        }
    }
}
