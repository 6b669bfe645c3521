//! Command-line front end: config loading, subcommand dispatch, output.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 numeric failure
//! (integration failure, inconclusive probe), 3 selftest failure.

mod commands;
pub mod config;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::run_subcommand;
pub use config::{load_config, parse_config, RunConfig, SystemKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_SELFTEST: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "spintop", version, about = "Spin-driven stability analysis for symmetric tops")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the transition at the pole; writes report.txt
    Classify { config: PathBuf },
    /// Sample the bifurcating branch; writes branch.csv
    Branch { config: PathBuf },
    /// Critical points for every spin in the grid; writes diagram.csv
    Sweep { config: PathBuf },
    /// Integrate the reduced or chart system; writes trajectory.csv
    Simulate { config: PathBuf },
    /// Dynamically test the stability of equilibria
    Probe { config: PathBuf },
    /// Run the built-in reference checks
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Branch { .. } => "branch",
            Command::Sweep { .. } => "sweep",
            Command::Simulate { .. } => "simulate",
            Command::Probe { .. } => "probe",
            Command::Selftest => "selftest",
        }
    }

    fn config_path(&self) -> Option<&PathBuf> {
        match self {
            Command::Classify { config }
            | Command::Branch { config }
            | Command::Sweep { config }
            | Command::Simulate { config }
            | Command::Probe { config } => Some(config),
            Command::Selftest => None,
        }
    }
}

/// Parse arguments, run, and return the process exit code. Results go to
/// `out`, diagnostics to `err`.
pub fn main_with_args<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let cfg = match cli.command.config_path().map(|p| load_config(p)).transpose() {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = writeln!(err, "spintop: {e}");
            return EXIT_CONFIG;
        }
    };
    run_subcommand(&cli.command, cfg.as_ref(), out, err)
}
