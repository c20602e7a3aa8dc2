//! `dho`: scenario runner for the damped oscillator dilations.

mod commands;
mod config;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Overrides, ScenarioConfig};

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable config, or parameters outside a precondition.
    Config(String),
    /// The verification table has failing rows.
    Verification,
}

impl From<dho_core::Error> for Failure {
    fn from(e: dho_core::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "dho", version, about = "Damped harmonic oscillator dilation scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// CSV of propagator entries per sample time.
    Evolve(Common),
    /// CSV of the decay expectation by every route.
    Decay(Common),
    /// CSV of closed-form and FFT spectral power over the energy band.
    Spectrum(Common),
    /// Invariant table; exit status 1 if any row fails.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// TOML scenario file; built-in defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides { omega: self.omega, gamma: self.gamma, dt: self.dt, t_max: self.t_max, out: self.out.clone() }
    }
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (common, which) = match &cli.command {
        Command::Evolve(c) => (c, "evolve"),
        Command::Decay(c) => (c, "decay"),
        Command::Spectrum(c) => (c, "spectrum"),
        Command::Verify(c) => (c, "verify"),
    };
    let cfg = ScenarioConfig::load(common.config.as_deref(), &common.overrides())?;
    let out = cfg.output_path.as_deref();
    match which {
        "evolve" => emit(&commands::evolve(&cfg)?, out),
        "decay" => emit(&commands::decay(&cfg)?, out),
        "spectrum" => emit(&commands::spectrum(&cfg)?, out),
        _ => {
            let report = commands::verify(&cfg)?;
            emit(&format!("{report}\n"), out)?;
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => {
            eprintln!("dho: verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("dho: {msg}");
            ExitCode::from(2)
        }
    }
}
