use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use ccplab::harness::{emit, parse_config, resolve_output, run_scenario, Format, HarnessError, Overrides, Scenario};

/// Run one scenario described by a TOML configuration.
#[derive(Debug, Parser)]
#[command(name = "ccplab", version)]
struct Cli {
    /// kd-dist, ccp, ergodicity, reconstruct, chain-rule, action-phase,
    /// free-propagator, midpoint, classical-density, gradient-check,
    /// coarse-grain, weak-sim or bias-scan.
    #[arg(value_parser = parse_scenario)]
    scenario: Scenario,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "D")]
    dim: Option<usize>,
    #[arg(long = "L")]
    length: Option<f64>,
    #[arg(long)]
    hbar: Option<f64>,
    #[arg(long)]
    mass: Option<f64>,
    /// Record wall-clock duration in the JSON envelope.
    #[arg(long)]
    timing: bool,
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

fn run(cli: Cli) -> Result<PathBuf, HarnessError> {
    let text =
        std::fs::read_to_string(&cli.config).map_err(|e| HarnessError::Io(format!("{}: {e}", cli.config.display())))?;
    let overrides = Overrides {
        scenario: Some(cli.scenario),
        seed: cli.seed,
        format: cli.format,
        output: cli.out,
        dim: cli.dim,
        length: cli.length,
        hbar: cli.hbar,
        mass: cli.mass,
    };
    let config = parse_config(&text, &overrides)?;
    let start = Instant::now();
    let mut envelope = run_scenario(&config)?;
    if cli.timing {
        envelope.wall_clock_seconds = Some(start.elapsed().as_secs_f64());
    }
    let path = resolve_output(&config);
    emit(&envelope, config.format, &path)?;
    Ok(path)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let d = e.diagnostic();
            eprintln!("{}", serde_json::to_string(&d).unwrap_or_else(|_| e.to_string()));
            ExitCode::from(d.exit_code)
        }
    }
}
