//! Scenario-driven experiments on top of `resex-core`, writing CSV tables
//! and optional SVG plots.
//!
//! The `resex` binary is a thin wrapper around [`execute`].

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod config;
pub mod experiments;
pub mod svg;
pub mod table;

pub use config::{EvaluatorChoice, Experiment, Format, ParamValue, Scale, ScenarioConfig, Sweep};
pub use experiments::Context;

/// Environment variable read when `--seed` is absent.
pub const SEED_ENV: &str = "RESEX_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error(transparent)]
    Numeric(#[from] resex_core::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot render plot: {0}")]
    Render(String),
}

impl CliError {
    /// 2 for configuration and output problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io { .. } => 2,
            Self::Numeric(_) | Self::Render(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "resex", version, about = "Gate experiments on spin qubits with residual exchange")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file, TOML or (with a .json extension) JSON.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Monte Carlo seed; overrides the scenario.
    #[arg(long, global = true, env = SEED_ENV, value_name = "U64")]
    pub seed: Option<u64>,
    /// Also render SVG plots from the written CSV files.
    #[arg(long, global = true)]
    pub svg: bool,
    #[arg(long, global = true, value_enum)]
    pub evaluator: Option<EvaluatorChoice>,
    /// Output path prefix; overrides the scenario.
    #[arg(long, global = true, value_name = "PREFIX")]
    pub out: Option<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Pauli coefficients of the two-drive propagator over time.
    DqdCoeffs,
    /// Single-drive and ZX-composed IY gates against exchange, with noise.
    DqdFid,
    /// Middle-site Y gate on a three-site chain.
    ChainY,
    /// Simultaneous and interleaved Y gates along chains.
    ChainSimul,
    /// SWAP in a four-site block.
    Swap,
    /// Transfer matrix, error generator and error coefficients of one gate.
    Report,
}

impl Command {
    pub fn experiment(self) -> Experiment {
        match self {
            Self::DqdCoeffs => Experiment::DqdCoeffs,
            Self::DqdFid => Experiment::DqdFid,
            Self::ChainY => Experiment::ChainY,
            Self::ChainSimul => Experiment::ChainSimul,
            Self::Swap => Experiment::Swap,
            Self::Report => Experiment::Report,
        }
    }
}

/// Loads and validates the scenario, applies command-line overrides and
/// runs it. Returns the files written.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let experiment = cli.command.experiment();
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default_for(experiment),
    };
    if cfg.experiment != experiment {
        return Err(CliError::Config(vec![format!(
            "experiment: the scenario is for {}, not {experiment}",
            cfg.experiment
        )]));
    }
    if let Some(out) = &cli.out {
        cfg.output = out.clone();
    }
    if let Some(ev) = cli.evaluator {
        cfg.evaluator = Some(ev);
    }
    cfg.validate()?;
    // Flag (or environment), then the scenario's noise section, then the
    // experiment's fixed default.
    let seed = cli
        .seed
        .or(cfg.noise.map(|n| n.seed))
        .unwrap_or(experiments::ExperimentSpec::of(experiment).default_seed);
    let mut ctx = Context::new(cfg, seed, cli.svg);
    experiments::run(&mut ctx)?;
    Ok(ctx.written)
}
