//! `qbm` — scenario runner for the quantum Brownian motion toolkit.
//!
//! Subcommands take a JSON scenario (`--config`, or the QBM_CONFIG
//! environment variable) and write CSV data, JSON summaries, and a run
//! manifest into `--out`. Exit codes: 0 success, 1 configuration or
//! runtime error, 2 validation-suite failure.

// `!(x > 0)` guards reject NaN along with out-of-domain values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod emit;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use commands::{Format, RunContext};
use config::ScenarioSpec;
use manifest::RunManifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Both,
}

#[derive(Parser)]
#[command(
    name = "qbm",
    version,
    about = "Exact quantum Brownian motion scenarios"
)]
struct Cli {
    /// Scenario JSON (falls back to the QBM_CONFIG environment variable)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Seed for stochastic subcommands
    #[arg(long, global = true, default_value_t = 20260809)]
    seed: u64,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Which data files to emit
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Both)]
    format: FormatArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Green function, local drift coefficients and diffusion coefficients
    Coefficients,
    /// Mean-square displacement and fluctuating-position moments
    Fluctuations,
    /// Wave-packet mean and variance over time
    Spread,
    /// Cat-state attenuation, decoherence-time fit, density slices
    Cat,
    /// Successive-measurement reference curves
    Reference,
    /// Cutoff dependence of the zero-temperature moments
    Divergence,
    /// Run oracle suites against the closed forms
    Validate {
        /// pde | mc | moments | bath | all
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Column-wise diff of two run directories
    Compare {
        #[arg(long)]
        run_a: PathBuf,
        #[arg(long)]
        run_b: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(n) = cli.threads {
        qbm_core::par::configure_threads(n);
    }
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
        FormatArg::Both => Format::Both,
    };
    let started = Instant::now();

    if let Command::Compare { run_a, run_b } = &cli.command {
        std::fs::create_dir_all(&cli.out)?;
        let outputs = commands::compare(run_a, run_b, &cli.out)?;
        let manifest = RunManifest::new(
            "compare",
            cli.seed,
            None,
            outputs,
            started.elapsed().as_secs_f64(),
        );
        emit::write_json(&cli.out.join("manifest.json"), &manifest)?;
        return Ok(true);
    }

    let config_path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os("QBM_CONFIG").map(PathBuf::from))
        .ok_or_else(|| anyhow!("no scenario: pass --config or set QBM_CONFIG"))?;
    let spec = ScenarioSpec::load(&config_path)
        .with_context(|| format!("loading {}", config_path.display()))?;
    std::fs::create_dir_all(&cli.out)?;
    let ctx = RunContext {
        spec: &spec,
        out: &cli.out,
        seed: cli.seed,
        format,
    };

    let (name, outputs, passed) = match &cli.command {
        Command::Coefficients => ("coefficients", commands::coefficients(&ctx)?, true),
        Command::Fluctuations => ("fluctuations", commands::fluctuations(&ctx)?, true),
        Command::Spread => ("spread", commands::spread(&ctx)?, true),
        Command::Cat => ("cat", commands::cat(&ctx)?, true),
        Command::Reference => ("reference", commands::reference(&ctx)?, true),
        Command::Divergence => ("divergence", commands::divergence(&ctx)?, true),
        Command::Validate { suite } => {
            let (outputs, passed) = commands::validate(&ctx, suite)?;
            ("validate", outputs, passed)
        }
        Command::Compare { .. } => unreachable!(),
    };
    let manifest = RunManifest::new(
        name,
        cli.seed,
        Some(&spec),
        outputs,
        started.elapsed().as_secs_f64(),
    );
    emit::write_json(&cli.out.join("manifest.json"), &manifest)?;
    if !passed {
        eprintln!("validation suite reported failures (see validate_*.json)");
    }
    Ok(passed)
}
