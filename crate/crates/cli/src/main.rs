//! Command-line entry point: config-driven runs of the atom-field
//! decoherence toolkit.
//!
//! Exit codes: 0 success, 1 run failure, 2 config error, 3 regime FAIL
//! (with `--require-regime`), 4 comparison-threshold breach inside the
//! validity regime, 5 I/O error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, CommandContext, EXIT_CONFIG};
use config::{ConfigError, RunConfig};

#[derive(Parser)]
#[command(name = "atomfield", version, about = "Two-level atom + single-mode field: regime checks, decoherence series, pointer-state scans and exact-oracle comparisons")]
struct Cli {
    /// Path to the TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Fail (exit 3) when the parameters violate the validity regime.
    #[arg(long, global = true)]
    require_regime: bool,

    /// pointer-scan: exit nonzero when the built-in ansatz minima are absent.
    #[arg(long, global = true)]
    self_test: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the regime ratios omega << omega0 << g*chi.
    Validate,
    /// Closed-form decoherence series in the qubit energy basis.
    Evolve,
    /// Bloch-sphere scan for pointer states under a propagator ansatz.
    PointerScan,
    /// Pointer-basis coherence series and revival detection.
    Decohere,
    /// Closed forms against the exact truncated-Fock oracle.
    Compare,
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let config_path = cli
        .config
        .ok_or_else(|| ConfigError::Field("--config PATH is required".into()))?;
    let config = RunConfig::load(&config_path)?;
    let ctx = CommandContext {
        config,
        out: cli.out,
        require_regime: cli.require_regime,
        self_test: cli.self_test,
    };
    match cli.command {
        Command::Validate => commands::cmd_validate(&ctx),
        Command::Evolve => commands::cmd_evolve(&ctx),
        Command::PointerScan => commands::cmd_pointer_scan(&ctx),
        Command::Decohere => commands::cmd_decohere(&ctx),
        Command::Compare => commands::cmd_compare(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap usage problems are config errors
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
