//! Command-line front end for `linkform-core`.
//!
//! Each subcommand reads a TOML config (a file or a built-in preset), writes
//! CSV tables plus `manifest.json` into `--out`, and maps failures to exit
//! codes: 2 bad config, 3 empty feasible rate set, 4 invariant violated at
//! run time.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{CommandOutput, SweepOptions};
use crate::config::FileConfig;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "linkform", version, about = "Communication-aware formation control toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration file.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in configuration.
    #[arg(long)]
    pub preset: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Communication radius for each bandwidth and data rate.
    Radius(Common),
    /// Window lengths meeting both range margins.
    Rates(Common),
    /// Stabilizing region of the (alpha, beta) gain plane.
    Gains(Common),
    /// One closed-loop run.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Repeated runs per window length, aggregated.
    Montecarlo {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "seeds")]
        runs: Option<usize>,
        /// File of seeds, whitespace or comma separated.
        #[arg(long)]
        seeds: Option<PathBuf>,
        /// Comma-separated window lengths, e.g. `2,3,4`.
        #[arg(long, value_delimiter = ',')]
        tau_sweep: Option<Vec<usize>>,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Radius(c) | Command::Rates(c) | Command::Gains(c) => c,
            Command::Simulate { common, .. } | Command::Montecarlo { common, .. } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Radius(_) => "radius",
            Command::Rates(_) => "rates",
            Command::Gains(_) => "gains",
            Command::Simulate { .. } => "simulate",
            Command::Montecarlo { .. } => "montecarlo",
        }
    }
}

pub fn load_config(common: &Common) -> Result<FileConfig, CliError> {
    match (&common.config, &common.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            FileConfig::parse(&text)
        }
        (None, Some(name)) => config::preset(name),
        (None, None) => Err(CliError::Config("pass --config PATH or --preset NAME".into())),
    }
}

pub fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::Config(format!("bad seed `{s}`"))))
        .collect()
}

/// Run a parsed command; returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let common = cli.command.common();
    let cfg = load_config(common)?;
    let out: CommandOutput = match &cli.command {
        Command::Radius(_) => commands::radius(&cfg)?,
        Command::Rates(_) => commands::rates(&cfg)?,
        Command::Gains(_) => commands::gains(&cfg)?,
        Command::Simulate { seed, .. } => commands::simulate(&cfg, *seed)?,
        Command::Montecarlo { runs, seeds, tau_sweep, .. } => {
            let seeds = match seeds {
                Some(path) => Some(parse_seeds(&fs::read_to_string(path).map_err(|e| {
                    CliError::Config(format!("cannot read {}: {e}", path.display()))
                })?)?),
                None => None,
            };
            let opts = SweepOptions { runs: *runs, seeds, tau_sweep: tau_sweep.clone() };
            commands::montecarlo(&cfg, &opts)?
        }
    };
    commands::finish(&common.out, cli.command.name(), &cfg, out)
}
