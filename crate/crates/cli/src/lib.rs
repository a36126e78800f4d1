//! Command-line front end for `opendeco`: JSON configuration in, CSV out.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 physical
//! validity failure. Flags take precedence over values in the config file.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;
pub use error::CliError;
pub use table::{fmt_num, linspace, CsvTable};

#[derive(Debug, Parser)]
#[command(
    name = "opendeco",
    version,
    about = "Decoherence and asymptotic entanglement of damped oscillators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Write output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the physical constraints on the configured environments.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Uncertainty determinant and decoherence degree over a (t, C) grid.
    DecoGrid {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: DecoGridArgs,
    },
    /// Density matrix in coordinate representation on an n×n grid.
    Density {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: DensityArgs,
    },
    /// Decoherence, thermal and relaxation time scales.
    Timescales {
        #[command(flatten)]
        common: Common,
    },
    /// Stationary two-mode covariance and its separability.
    Asymptotic {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        allow_unphysical: bool,
    },
    /// Two-mode covariance trajectory from a product initial state.
    Propagate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: PropagateArgs,
    },
    /// Separability phase map over (Dxx, Dxpy) for the special family.
    Scan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: ScanArgs,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct DecoGridArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub t_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub t_steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub c_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c_max: Option<f64>,
    #[arg(long)]
    pub c_steps: Option<usize>,
    /// Evaluate at t = ∞ instead of the time grid.
    #[arg(long, alias = "stationary")]
    pub asymptotic: bool,
    /// Mark invalid C nodes in a status column instead of failing.
    #[arg(long)]
    pub skip_invalid: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DensityArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Use the stationary (thermal) density matrix.
    #[arg(long, alias = "asymptotic")]
    pub stationary: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PropagateArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    /// Number of uniform intervals; `steps + 1` rows are written.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Start from the stationary state instead of the product state.
    #[arg(long)]
    pub from_asymptotic: bool,
    #[arg(long)]
    pub allow_unphysical: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScanArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub dxx_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub dxx_max: Option<f64>,
    #[arg(long)]
    pub dxx_steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub dxpy_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub dxpy_max: Option<f64>,
    #[arg(long)]
    pub dxpy_steps: Option<usize>,
}

/// Text destined for the output sink and the exit code to finish with.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, exit_code: 0 }
    }
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Validate { common }
            | Command::DecoGrid { common, .. }
            | Command::Density { common, .. }
            | Command::Timescales { common }
            | Command::Asymptotic { common, .. }
            | Command::Propagate { common, .. }
            | Command::Scan { common, .. } => common,
        }
    }
}

/// Loads the configuration and runs the command.
pub fn run(command: &Command) -> Result<Outcome, CliError> {
    let cfg = RunConfig::load(&command.common().config)?;
    run_with_config(command, &cfg)
}

pub fn run_with_config(command: &Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    use commands::*;
    match command {
        Command::Validate { .. } => cmd_validate(cfg),
        Command::DecoGrid { grid, .. } => cmd_deco_grid(cfg, grid).map(|t| Outcome::ok(t.render())),
        Command::Density { grid, .. } => cmd_density(cfg, grid).map(|t| Outcome::ok(t.render())),
        Command::Timescales { .. } => cmd_timescales(cfg).map(|t| Outcome::ok(t.render())),
        Command::Asymptotic {
            allow_unphysical, ..
        } => cmd_asymptotic(cfg, *allow_unphysical).map(|t| Outcome::ok(t.render())),
        Command::Propagate { args, .. } => {
            cmd_propagate(cfg, args).map(|t| Outcome::ok(t.render()))
        }
        Command::Scan { grid, .. } => cmd_scan(cfg, grid).map(|t| Outcome::ok(t.render())),
    }
}
