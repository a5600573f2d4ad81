use std::fs::File;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;

use stochcuts::drivers::{run as run_driver, Algorithm, RunConfig};
use stochcuts::instances::{dim1_random, generate_sslp, random_instance, thm1, GeneratorConfig};
use stochcuts::oracle::{
    check_cut_validity, check_dim1_no_gap, closure_bounds, check_pbbenc_dominance, check_refinement_monotone,
    check_thm1_strictness, random_refinement_chain, Verdict, VerificationReport,
};
use stochcuts::partition::Partition;
use stochcuts::Instance;

use crate::cutfile::read_cuts;
use crate::load::resolve;
use crate::{EXIT_OK, EXIT_VERIFY_FAIL};

pub const SUITES: [&str; 6] = ["all", "thm1", "dim1", "validity", "dominance", "monotone"];

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// all, thm1, dim1, validity, dominance or monotone.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Inclusive range `a..b` or a comma-separated list.
    #[arg(long, default_value = "1..20")]
    pub seeds: String,
    /// Check this cut pool (see `solve --cuts-out`) against `--instance`.
    #[arg(long, requires = "instance")]
    pub cuts: Option<PathBuf>,
    #[arg(long)]
    pub instance: Option<String>,
    /// Per-run time limit inside the suites, in seconds.
    #[arg(long, default_value_t = 120.0)]
    pub time_limit: f64,
}

pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().with_context(|| format!("bad seed range {s:?}"))?;
        let b: u64 = b.trim().parse().with_context(|| format!("bad seed range {s:?}"))?;
        if a > b {
            bail!("empty seed range {s:?}");
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| anyhow!("bad seed {t:?}")))
        .collect()
}

/// Small sslp-like instance whose first stage is cheap to enumerate.
pub fn small_sslp(seed: u64) -> Result<Instance> {
    let c = GeneratorConfig::sslp(3 + (seed % 3) as usize, 4 + (seed % 3) as usize, 3 + (seed % 4) as usize, seed);
    Ok(generate_sslp(&c)?)
}

fn config(algo: Algorithm, time_limit: f64) -> RunConfig {
    let mut c = RunConfig::new(algo);
    c.time_limit = Duration::from_secs_f64(time_limit);
    c
}

fn dominance(seed: u64, time_limit: f64) -> Result<VerificationReport> {
    let inst = small_sslp(seed)?;
    let name = format!("sslp-small-{seed}");
    let r = run_driver(&inst, &config(Algorithm::Apblagc, time_limit))?;
    let mut worst: Option<VerificationReport> = None;
    for rec in &r.pbbenc_log {
        let rep = check_pbbenc_dominance(&inst, &name, &rec.cut, &rec.duals)?;
        if !rep.passed() {
            return Ok(rep);
        }
        if worst.as_ref().map_or(true, |w| rep.worst_violation > w.worst_violation) {
            worst = Some(rep);
        }
    }
    Ok(match worst {
        Some(mut w) => {
            w.detail = format!("{} cluster/dual pairs", r.pbbenc_log.len());
            w
        }
        None => VerificationReport {
            check: "pbbenc_dominance".into(),
            instance: name,
            verdict: Verdict::Pass,
            worst_violation: 0.0,
            witness: None,
            detail: "no partition-based Benders cuts generated".into(),
        },
    })
}

fn validity(seed: u64, time_limit: f64) -> Result<VerificationReport> {
    let inst = small_sslp(seed)?;
    let mut cuts = Vec::new();
    for algo in [Algorithm::Benders, Algorithm::Bdd, Algorithm::Apblagc] {
        cuts.extend(run_driver(&inst, &config(algo, time_limit))?.cuts);
    }
    Ok(check_cut_validity(&inst, &format!("sslp-small-{seed}"), &cuts)?)
}

fn monotone(seed: u64) -> Result<VerificationReport> {
    let scenarios = 2 + (seed % 5) as usize;
    let inst = random_instance(scenarios, 3, 3, 2, 4, seed);
    let chain = random_refinement_chain(scenarios, seed);
    Ok(check_refinement_monotone(&inst, &format!("random-{seed}"), &chain)?)
}

pub fn run(a: &VerifyArgs) -> Result<u8> {
    if !SUITES.contains(&a.suite.as_str()) {
        bail!("unknown suite {:?} (expected one of {})", a.suite, SUITES.join(", "));
    }
    let seeds = parse_seeds(&a.seeds)?;
    let wants = |s: &str| a.suite == "all" || a.suite == s;
    let mut reports = Vec::new();
    let mut report = |rep: VerificationReport| {
        println!("{rep}");
        reports.push(rep.passed());
    };
    if let Some(path) = &a.cuts {
        let inst = resolve(a.instance.as_deref().unwrap_or_default())?;
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        let cuts = read_cuts(file).with_context(|| format!("in {}", path.display()))?;
        report(check_cut_validity(&inst.instance, &inst.name, &cuts)?);
    }
    if wants("thm1") {
        let inst = thm1();
        let b = closure_bounds(&inst, &Partition::single(inst.num_scenarios()))?;
        println!(
            "thm1 closures (benders, lagrangian, partition) = ({}, {}, {})",
            b.benders, b.lagrangian, b.partition
        );
        report(check_thm1_strictness()?);
    }
    if wants("dim1") {
        for &s in &seeds {
            report(check_dim1_no_gap(&dim1_random(s), &format!("dim1-random-{s}"))?);
        }
    }
    if wants("validity") {
        for &s in &seeds {
            report(validity(s, a.time_limit)?);
        }
    }
    if wants("dominance") {
        for &s in &seeds {
            report(dominance(s, a.time_limit)?);
        }
    }
    if wants("monotone") {
        for &s in &seeds {
            report(monotone(s)?);
        }
    }
    let failed = reports.iter().filter(|p| !**p).count();
    println!("{} checks, {} failed", reports.len(), failed);
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY_FAIL })
}
