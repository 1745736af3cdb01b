//! `uhbms`: run verification campaigns and write reports.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 on a
//! configuration or I/O error.

mod commands;
mod config;
mod report;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;
use uhbms::Exec;

use config::CampaignConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "uhbms", version, about = "Verification campaigns for little groups and induced representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Campaign configuration (TOML). Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Main grid of the command (sample grid, scan grid or lattice side).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Print the JSON report on stdout instead of the summary.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Invariance of the fixed functions under their little groups.
    VerifyInvariance,
    /// Decay of group averages for the subgroups without fixed functions.
    Vanishing,
    /// Fixed-set scans of the witness functions.
    Actuality,
    /// Fundamental regions: exact areas, mirror relations and SVG figures.
    Regions,
    /// Characters, invariant measures and induced operators.
    Induced,
}

impl Command {
    fn apply_grid(self, cfg: &mut CampaignConfig, grid: usize) {
        match self {
            Command::VerifyInvariance => cfg.invariance.grid = grid,
            Command::Vanishing => cfg.vanishing.grid = grid,
            Command::Actuality => cfg.actuality.grid = grid,
            Command::Regions => cfg.regions.orbit_points = grid,
            Command::Induced => cfg.induced.lattice = grid,
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => CampaignConfig::load(p)?,
        None => CampaignConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Some(g) = cli.grid {
        cli.command.apply_grid(&mut cfg, g);
    }
    cfg.validate()?;
    let out = cfg.out.clone();
    std::fs::create_dir_all(&out)?;
    let exec = Exec::default();
    let report = match cli.command {
        Command::VerifyInvariance => commands::verify_invariance(&cfg, exec)?,
        Command::Vanishing => commands::vanishing(&cfg, &out, exec)?,
        Command::Actuality => commands::actuality(&cfg, &out, exec)?,
        Command::Regions => commands::regions(&cfg, &out)?,
        Command::Induced => commands::induced(&cfg, exec)?,
    };
    report.write(&out)?;
    if cli.json {
        let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
        println!("{json}");
    } else {
        print!("{}", report.summary());
    }
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
