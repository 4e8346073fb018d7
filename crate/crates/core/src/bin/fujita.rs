use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fujita_core::config::{parse_config_for, Command};
use fujita_core::runner::execute;
use fujita_core::FujitaError;

/// Numerical laboratory for the semilinear fractional heat equation.
///
/// Exit status: 0 when every built-in assertion passes, 1 when an assertion
/// fails, 2 for invalid configs or errors during the experiment.
#[derive(Debug, Parser)]
#[command(name = "fujita", version)]
struct Cli {
    /// One of verify-steady, evolve, dichotomy, fk-check, ball, regime.
    command: Command,
    /// JSON config document.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the `seed` key of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the `output_dir` key of the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, env = "FUJITA_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads.filter(|n| *n > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("fujita: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("fujita: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let mut config = match parse_config_for(&text, Some(cli.command)) {
        Ok(c) => c,
        Err(FujitaError::Config(errors)) => {
            eprintln!("fujita: invalid config {}:", cli.config.display());
            for e in errors {
                eprintln!("  - {e}");
            }
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("fujita: {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = cli.seed {
        config = config.with_seed(seed);
    }
    if let Some(out) = cli.out {
        config = config.with_output_dir(out);
    }
    let report = match execute(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("fujita: {e}");
            return ExitCode::from(2);
        }
    };
    for a in &report.assertions {
        println!("{} {}: {} (expected {})", if a.passed { "PASS" } else { "FAIL" }, a.name, a.value, a.expected);
    }
    if let Some(e) = &report.error {
        eprintln!("fujita: {} stopped early: {e}", report.command);
        return ExitCode::from(2);
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
