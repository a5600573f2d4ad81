use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Args;

use stochcuts::drivers::{run as run_driver, RunResult, Termination};
use stochcuts::trace::{trace_rows, write_rows, CutCounts};

use crate::cutfile::write_cuts;
use crate::load::{resolve, NamedInstance};
use crate::{parse_algorithm, RunFlags, EXIT_OK, EXIT_TIME_LIMIT};

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// benders, bdd, alg1 or apblagc.
    #[arg(long)]
    pub algo: String,
    /// Instance file or built-in name.
    #[arg(long)]
    pub instance: String,
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    /// Write the final cut pool here.
    #[arg(long)]
    pub cuts_out: Option<PathBuf>,
    #[command(flatten)]
    pub flags: RunFlags,
}

pub struct Solved {
    pub result: RunResult,
    pub seconds: f64,
}

pub fn solve_one(inst: &NamedInstance, algo: &str, flags: &RunFlags) -> Result<Solved> {
    let config = flags.config(parse_algorithm(algo)?)?;
    let start = Instant::now();
    let result = run_driver(&inst.instance, &config)
        .with_context(|| format!("{algo} on {}", inst.name))?;
    Ok(Solved {
        result,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn write_trace(path: &Path, run_id: &str, inst: &NamedInstance, result: &RunResult) -> Result<()> {
    let rows = trace_rows(
        &result.trace,
        run_id,
        result.algorithm.name(),
        &inst.name,
        inst.instance.num_scenarios(),
    );
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    write_rows(BufWriter::new(file), &rows)?;
    Ok(())
}

pub fn summary(inst: &NamedInstance, s: &Solved) -> String {
    let r = &s.result;
    let counts = CutCounts::of(&r.cuts);
    let ub = r.upper_bound.map_or("-".to_string(), |u| u.to_string());
    let mut line = format!(
        "algo={} instance={} lower_bound={} upper_bound={ub} ccut={} fcut={} partition={} refine={} termination={} wall={:.3}s",
        r.algorithm.name(),
        inst.name,
        r.lower_bound,
        counts.ccut(),
        counts.fcut(),
        r.partition.len(),
        r.refinements,
        r.termination.name(),
        s.seconds
    );
    if let Some(b) = r.mip_master_bound {
        line.push_str(&format!(" mip_master_bound={b}"));
    }
    line
}

pub fn run(a: &SolveArgs) -> Result<u8> {
    let inst = resolve(&a.instance)?;
    let solved = solve_one(&inst, &a.algo, &a.flags)?;
    if let Some(path) = &a.trace_out {
        write_trace(path, &format!("{}-{}", inst.name, a.algo), &inst, &solved.result)?;
    }
    if let Some(path) = &a.cuts_out {
        let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        write_cuts(BufWriter::new(file), &solved.result.cuts)?;
    }
    println!("{}", summary(&inst, &solved));
    if solved.result.termination == Termination::TimeLimit {
        return Ok(EXIT_TIME_LIMIT);
    }
    Ok(EXIT_OK)
}
