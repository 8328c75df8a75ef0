use std::path::PathBuf;
use std::process::ExitCode;

use abflux_cli::config::{parse_config, Format, Output};
use abflux_cli::run::run;
use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "abflux", version, about = "Bound states, scattering and wave symbols of point interactions with an Aharonov-Bohm flux")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Negative eigenvalues with multiplicities.
    Spectrum(Common),
    /// Scattering matrix on the momentum grid.
    Smatrix(Common),
    /// Low- and high-energy limits and energy independence (JSON).
    Classify(Common),
    /// Wave-operator symbol on the x grid at `wave_kappa`.
    Wavesymbol(Common),
    /// Quadrature oracle battery (JSON).
    Verify(Common),
    /// Every output listed in the config.
    Run(Common),
}

#[derive(Args)]
struct Common {
    /// Config file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the config format for tabular outputs.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn execute(cli: Cli) -> Result<bool> {
    let (common, only) = match cli.command {
        Command::Spectrum(c) => (c, Some(Output::Spectrum)),
        Command::Smatrix(c) => (c, Some(Output::Smatrix)),
        Command::Classify(c) => (c, Some(Output::Classify)),
        Command::Wavesymbol(c) => (c, Some(Output::Wavesymbol)),
        Command::Verify(c) => (c, Some(Output::Verify)),
        Command::Run(c) => (c, None),
    };
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    let text = std::fs::read_to_string(&common.config).with_context(|| format!("reading {}", common.config.display()))?;
    let mut cfg = parse_config(&text).with_context(|| format!("invalid config {}", common.config.display()))?;
    if let Some(format) = common.format {
        cfg.format = format;
    }
    if let Some(output) = only {
        cfg.outputs = vec![output];
    }
    let report = run(&cfg, &common.out)?;
    for file in &report.files {
        println!("wrote {}", file.display());
    }
    for failure in &report.failures {
        eprintln!("FAILED: {failure}");
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
