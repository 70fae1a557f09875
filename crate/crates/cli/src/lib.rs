//! Command-line front end for the `gromon` solvers.
//!
//! [`run`] executes a parsed command line against explicit output streams
//! and returns the process exit code: 0 on success, 2 when no
//! measure-preserving map exists, 1 on any input error.

mod commands;
mod output;
pub mod suite;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use gromon::solvers::DEFAULT_CAP;
use gromon::Exponent;

pub use commands::CliError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "gromon",
    version,
    about = "Gromov-Wasserstein and Gromov-Monge distances between measure networks"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Distortion exponent: a real p >= 1 or "inf".
    #[arg(long, global = true, default_value = "2")]
    pub p: Exponent,

    /// Seed for randomized restarts and instance generation.
    #[arg(long, global = true, env = "GROMON_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Number of restarts for the heuristic solvers.
    #[arg(long, global = true, default_value_t = 20)]
    pub restarts: usize,

    /// Stopping tolerance on the Frank-Wolfe gap.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads for parallel restarts.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    /// Heat kernel time (required by `heat`).
    #[arg(long = "t", global = true)]
    pub t: Option<f64>,

    /// Largest number of maps exact enumeration may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: u64,

    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InstanceKind {
    Spd,
    Metric,
    Cloud,
    Graph,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Exact Gromov-Monge distance by enumerating measure-preserving maps.
    Gm { x: PathBuf, y: PathBuf },
    /// Upper bound on GW_2 by Frank-Wolfe over couplings.
    Gw {
        x: PathBuf,
        y: PathBuf,
        /// Starting coupling; the product coupling when absent.
        #[arg(long)]
        init: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        max_iters: usize,
    },
    /// GW_2 between positive definite networks by permutation ascent.
    Spd { x: PathBuf, y: PathBuf },
    /// Isometry-invariant Monge distance between point clouds (upper bound).
    Miso {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = 100)]
        max_alternations: usize,
        /// Exclude reflections.
        #[arg(long)]
        proper: bool,
    },
    /// Heat kernel network exp(-tL) of a graph.
    Heat { graph: PathBuf },
    /// Mass-split network realizing a coupling as a measure-preserving map.
    Split { x: PathBuf, y: PathBuf, coupling: PathBuf },
    /// Seeded random instance.
    Rand {
        kind: InstanceKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Edge probability for graphs.
        #[arg(long, default_value_t = 0.5)]
        prob: f64,
    },
    /// Run the acceptance criteria and print a pass/fail table.
    Suite,
}

/// Parses `args` (program name first) and runs it.
pub fn run_from_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => run(&config, stdout, stderr),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            code
        }
    }
}

/// Runs one command. Output goes to `--out` when given, else to `stdout`.
pub fn run(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match commands::execute(config, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT
        }
    }
}
