use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use opo_cli::{commands, CliError, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "opo", version, about = "Steady states, Wigner maps and non-Gaussianity of a quantum parametric oscillator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the (h, F) sweep and write sweep.csv and plots
    Steady(Common),
    /// Wigner map of a single (h, F) point
    Wigner(Common),
    /// Mean-field fixed points over the configured points
    Classical(Common),
    /// Run the invariant checks; exits 3 if any fails
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; built-in defaults when absent
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for all cores
    #[arg(long)]
    workers: Option<usize>,
    /// Fock-space truncation
    #[arg(long = "n-max")]
    n_max: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.apply(&Overrides { out: self.out.clone(), workers: self.workers, n_max: self.n_max });
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Steady(c) => commands::run_steady(&c.load()?),
        Command::Wigner(c) => commands::run_wigner(&c.load()?),
        Command::Classical(c) => commands::run_classical(&c.load()?),
        Command::Validate(c) => commands::validate(&c.load()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors count as configuration errors
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
