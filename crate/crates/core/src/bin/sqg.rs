use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sqg::runner::{self, Overrides, RunError, EXIT_CONFIG, EXIT_OK};

/// Pseudo-spectral SQG solver: Eulerian and Lagrangian runs, invariant
/// checks, and the gliding-hump experiment.
#[derive(Parser)]
#[command(name = "sqg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `[output].directory`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed, overriding `rng_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print errors only.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Integrate the configured formulation and write diagnostics and snapshots.
    Simulate,
    /// Run the invariant suites and print a PASS/FAIL table.
    Check,
    /// Run the non-uniform dependence experiment.
    Nonuniform,
    /// Evaluate the scaling identity.
    Scaling,
}

fn run(cli: &Cli) -> Result<String, RunError> {
    let overrides = Overrides { out: cli.out.clone(), seed: cli.seed };
    let cfg = runner::load_config(cli.config.as_deref(), &overrides)?;
    match cli.command {
        Command::Simulate => runner::cmd_simulate(&cfg),
        Command::Check => {
            let report = runner::cmd_check(&cfg)?;
            if !cli.quiet {
                println!("{report}");
            }
            match report.failed() {
                0 => Ok(String::new()),
                failed => Err(RunError::CheckFailed { failed, total: report.rows.len() }),
            }
        }
        Command::Nonuniform => runner::cmd_nonuniform(&cfg),
        Command::Scaling => runner::cmd_scaling(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { EXIT_OK as u8 });
        }
    };
    let level = if cli.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(report) => {
            if !cli.quiet && !report.is_empty() {
                println!("{report}");
            }
            ExitCode::from(EXIT_OK as u8)
        }
        Err(e) => {
            let code = e.exit_code();
            eprintln!("error: {e}");
            ExitCode::from(code as u8)
        }
    }
}
