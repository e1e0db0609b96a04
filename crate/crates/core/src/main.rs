use clap::{Parser, Subcommand};
use jetstokes::harness::{self, CommandOutcome, RunConfig};
use jetstokes::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Spectral experiments with the free-surface Stokes operator of a liquid jet.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// TOML run configuration; defaults apply to omitted keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve Δu = f with u = 0 on the free surface (stored f or the Bessel example).
    SolveMode,
    /// Helmholtz-project a stored or random vector field.
    Project,
    /// Eigenvalues of the reduced operator for the configured axial modes.
    Spectrum,
    /// Resolvent gains along the configured rays.
    ResolventSweep,
    /// Forced time stepping with energy trace and estimate report.
    Evolve,
    /// Run the full acceptance suite.
    VerifyAll,
}

fn load_config(cli: &Cli) -> jetstokes::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> jetstokes::Result<CommandOutcome> {
    let cfg = load_config(&cli).map_err(|e| Error::Criterion {
        module: "harness",
        criterion: "configuration".into(),
        message: e.to_string(),
    })?;
    let out = cfg.output_dir.clone();
    match cli.command {
        Command::SolveMode => harness::cmd_solve_mode(&cfg, &out),
        Command::Project => harness::cmd_project(&cfg, &out),
        Command::Spectrum => harness::cmd_spectrum(&cfg, &out),
        Command::ResolventSweep => harness::cmd_resolvent_sweep(&cfg, &out),
        Command::Evolve => harness::cmd_evolve(&cfg, &out),
        Command::VerifyAll => harness::cmd_verify_all(&cfg, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
