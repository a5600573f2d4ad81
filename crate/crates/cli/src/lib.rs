//! Command-line front end: instance generation, single runs, comparison
//! tables, bound-vs-time plots and verification suites.

pub mod compare;
pub mod cutfile;
pub mod generate;
pub mod load;
pub mod plot;
pub mod solve;
pub mod verify;

use std::time::Duration;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

use stochcuts::drivers::{Algorithm, RunConfig};
use stochcuts::Execution;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_TIME_LIMIT: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "stochcuts", version, about = "Partition-based cuts for two-stage stochastic integer programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a seeded random instance file.
    Generate(generate::GenerateArgs),
    /// Run one algorithm on one instance.
    Solve(solve::SolveArgs),
    /// Run several algorithms over several instances and tabulate bounds.
    Compare(compare::CompareArgs),
    /// Draw lower bound against time from trace files as SVG.
    Plot(plot::PlotArgs),
    /// Run verification suites.
    Verify(verify::VerifyArgs),
}

/// Flags shared by `solve` and `compare`.
#[derive(Args, Debug, Clone)]
pub struct RunFlags {
    /// Wall-clock limit per run, in seconds.
    #[arg(long, default_value_t = 3600.0)]
    pub time_limit: f64,
    #[arg(long, default_value_t = 0.2)]
    pub kappa1: f64,
    /// Coefficient `c` of the refinement threshold `c / (k+1)^2`.
    #[arg(long, default_value_t = 2.0)]
    pub delta_coef: f64,
    /// Outer iterations allowed per Lagrangian separation.
    #[arg(long, default_value_t = 50)]
    pub sep_budget: usize,
    /// Re-solve the final master with integrality and report its bound.
    #[arg(long)]
    pub final_mip_master: bool,
    /// Disable data-parallel sweeps inside a run.
    #[arg(long)]
    pub sequential: bool,
}

impl RunFlags {
    pub fn config(&self, algorithm: Algorithm) -> Result<RunConfig> {
        if !(self.time_limit > 0.0 && self.time_limit.is_finite()) {
            bail!("time limit must be a positive number of seconds");
        }
        let mut c = RunConfig::new(algorithm);
        c.time_limit = Duration::from_secs_f64(self.time_limit);
        c.kappa1 = self.kappa1;
        c.delta.coefficient = self.delta_coef;
        c.separation.budget = self.sep_budget;
        c.final_mip_master = self.final_mip_master;
        c.execution = if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        };
        c.validate()?;
        Ok(c)
    }
}

pub fn parse_algorithm(s: &str) -> Result<Algorithm> {
    match Algorithm::parse(s) {
        Some(a) => Ok(a),
        None => bail!("unknown algorithm {s:?} (expected one of benders, bdd, alg1, apblagc)"),
    }
}

pub fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Generate(a) => generate::run(&a),
        Command::Solve(a) => solve::run(&a),
        Command::Compare(a) => compare::run(&a),
        Command::Plot(a) => plot::run(&a),
        Command::Verify(a) => verify::run(&a),
    }
}
