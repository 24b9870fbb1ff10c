//! `gauge-sim`: batch front-end for the trapped spin-orbit simulator.
//!
//! Exit status: 0 success, 1 physics or validation advisory, 2 malformed input.

mod commands;
mod config;
mod error;
mod output;
mod state;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gauge_sim::dynamics::GridSpec;

use crate::commands::Context;
use crate::config::{parse_b1_list, parse_grid, parse_triple, Format, Overrides, RunConfig, CONSTANTS_ENV};
use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "gauge-sim", version, about = "Spin-orbit coupled trapped atom: fields, spectra, dynamics, densities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Maxwell check and derived couplings of the configured field (JSON report).
    FieldCheck,
    /// Lowest k eigenvalues for each b1 of the sweep.
    Spectrum,
    /// Time series of y, z, py, pz, sx, sy, sz, H and norm.
    Evolve,
    /// Position density p(y, z) at the snapshot time (--tmax).
    Density,
    /// The built-in gradient configurations.
    Presets,
}

#[derive(Clone, Debug)]
struct B1Arg(Vec<f64>);

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Coupling b1: a value, a list `a,b,c` or a range `start:stop:step`.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = |s: &str| parse_b1_list(s).map(B1Arg))]
    b1: Option<B1Arg>,
    /// Uniform field b0 as `x,y,z` (dimensionless).
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_triple)]
    b0: Option<[f64; 3]>,
    /// Largest occupation per oscillator.
    #[arg(long, global = true)]
    nmax: Option<usize>,
    /// Initial state: fock(n,m,s), coherent(a,b,up,down) or spin(theta,phi).
    #[arg(long, global = true)]
    state: Option<String>,
    /// Final time in units of 1/omega (snapshot time for `density`).
    #[arg(long, global = true)]
    tmax: Option<f64>,
    /// Sampling step in units of 1/omega.
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Append first-order predictions and report their errors.
    #[arg(long, global = true)]
    oracle: bool,
    /// Density grid `min,max,step` shared by both axes.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_grid)]
    grid: Option<GridSpec>,
    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

fn run(cli: Cli) -> CliResult<()> {
    let c = cli.common;
    let config = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let env_constants = std::env::var_os(CONSTANTS_ENV).map(PathBuf::from);
    let ctx = Context {
        config,
        overrides: Overrides {
            b1: c.b1.map(|b| b.0),
            b0: c.b0,
            n_max: c.nmax,
            state: c.state,
            t_max: c.tmax,
            dt: c.dt,
            oracle: c.oracle,
            grid: c.grid,
            out: c.out,
            format: c.format,
        },
        env_constants,
    };
    match cli.command {
        Command::FieldCheck => commands::field_check(ctx),
        Command::Spectrum => commands::spectrum(ctx),
        Command::Evolve => commands::evolve(ctx),
        Command::Density => commands::density_cmd(ctx),
        Command::Presets => commands::presets(ctx),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format(|buf, rec| writeln!(buf, "{}: {}", rec.level().as_str().to_lowercase(), rec.args()))
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = match e {
                CliError::Advisory(_) => "advisory",
                _ => "error",
            };
            eprintln!("{kind}: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
