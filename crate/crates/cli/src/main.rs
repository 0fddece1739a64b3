use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hororadon_cli::{run, ExperimentConfig, RunOptions, EXIT_CONFIG, EXIT_IO};
use log::{error, info};

/// Horocycle transform experiments driven by a TOML config.
#[derive(Parser, Debug)]
#[command(name = "hororadon", version)]
struct Args {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Directory for the CSV, report and dataset files.
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    /// Worker threads; overrides HORORADON_THREADS.
    #[arg(long)]
    threads: Option<usize>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var("HORORADON_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| format!("HORORADON_THREADS must be a positive integer, got {v:?}")),
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let level = match args.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let threads = match args.threads {
        Some(t) => Some(t),
        None => match threads_from_env() {
            Ok(t) => t,
            Err(e) => {
                error!("{e}");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        },
    };
    if threads == Some(0) {
        error!("thread count must be positive");
        return ExitCode::from(EXIT_CONFIG as u8);
    }

    let cfg = match ExperimentConfig::load(&args.config) {
        Err(e) => {
            error!("cannot read {}: {e}", args.config.display());
            return ExitCode::from(EXIT_IO as u8);
        }
        Ok(Err(e)) => {
            error!("{}: {e}", args.config.display());
            return ExitCode::from(EXIT_CONFIG as u8);
        }
        Ok(Ok(c)) => c,
    };
    let opts = RunOptions {
        output_dir: args.output_dir,
        threads,
    };
    let outcome = run(&cfg, &opts);
    let r = &outcome.report;
    for c in &r.checks {
        info!(
            "{} {}: {:.3e} {} {:.3e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.achieved,
            c.comparison,
            c.tolerance
        );
    }
    if let Some(e) = &r.error {
        error!("{e}");
    }
    println!(
        "{}: {} ({} checks, {:.1} s)",
        r.command,
        r.status,
        r.checks.len(),
        r.elapsed_seconds
    );
    ExitCode::from(outcome.exit_code as u8)
}
