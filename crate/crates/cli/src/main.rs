//! `simulate`: command-line front end for the cavity-Fermi-gas simulator.
//!
//! Usage: `simulate <mode> --config <path> [--out <path>] [--seed <int>]`.
//! Exit codes: 0 success, 1 numerical failure (partial output written and
//! flagged), 2 configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fermicav_cli::config::{parse_config, Mode};
use fermicav_cli::run;

#[derive(Parser, Debug)]
#[command(
    name = "simulate",
    about = "Polarized Fermi gas in a pumped cavity: steady states, dynamics, and basin scans"
)]
struct Cli {
    /// What to compute; must match the mode block in the config file.
    #[arg(value_enum)]
    mode: Mode,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; overrides `output` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the seeded operations (recorded in the artifact header).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("simulate: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let parsed = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("simulate: {e}");
            return ExitCode::from(2);
        }
    };
    if parsed.mode != cli.mode {
        eprintln!(
            "simulate: mode mismatch: command line says {}, config holds a {} block",
            cli.mode, parsed.mode
        );
        return ExitCode::from(2);
    }

    match run::run(&parsed, cli.seed, cli.out.as_deref()) {
        Ok(outcome) => {
            if outcome.flagged_rows > 0 {
                eprintln!(
                    "simulate: {} flagged row(s); partial results in {}",
                    outcome.flagged_rows,
                    outcome.output.display()
                );
                ExitCode::from(1)
            } else {
                eprintln!("simulate: wrote {}", outcome.output.display());
                ExitCode::SUCCESS
            }
        }
        Err(run::RunError::Setup(msg)) => {
            eprintln!("simulate: {msg}");
            ExitCode::from(2)
        }
        Err(run::RunError::Numerical(msg)) => {
            eprintln!("simulate: {msg}");
            ExitCode::from(1)
        }
    }
}
