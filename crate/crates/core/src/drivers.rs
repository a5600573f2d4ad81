//! End-to-end algorithms: multi-cut Benders on the LP relaxation, Benders
//! dual decomposition (per-scenario Lagrangian cuts), the adaptive
//! partition-based algorithm that solves aggregated MIPs, and the adaptive
//! partition-based Lagrangian cut algorithm.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use log::debug;

use crate::benders::{
    cluster_benders_round, recourse_lower_bounds, scenario_benders_round, solve_all_scenarios,
    solve_master, RoundOutcome,
};
use crate::error::{Error, Result};
use crate::lagrangian::{separate, SeparationConfig, SeparationStatus, Target};
use crate::mip::{solve_mip_with, MipLimits, MipStatus};
use crate::model::{dot, Cut, CutKind, Instance, MasterState};
use crate::parallel::{map_collect, Execution};
use crate::partition::{
    aggregate_all, partition_problem, AggregatedScenario, DeltaSchedule, DualScaling, Partition,
};
use crate::trace::{CutCounts, EventKind, RunTrace, TraceEvent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Benders,
    Bdd,
    Alg1,
    Apblagc,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Benders,
        Algorithm::Bdd,
        Algorithm::Alg1,
        Algorithm::Apblagc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Benders => "benders",
            Algorithm::Bdd => "bdd",
            Algorithm::Alg1 => "alg1",
            Algorithm::Apblagc => "apblagc",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }
}

/// Threshold used by the aggregated-MIP algorithm: scenarios stay together
/// only when their duals agree up to round-off.
pub const EXACT_DUAL_DELTA: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    /// Outer stopping fraction of the partition-based Lagrangian algorithm.
    pub kappa1: f64,
    pub delta: DeltaSchedule,
    /// Rounds looked back by the stall rule.
    pub stall_window: usize,
    /// Stall when the last `stall_window` rounds closed at most this share
    /// of the progress made under the current partition.
    pub stall_fraction: f64,
    pub time_limit: Duration,
    pub separation: SeparationConfig,
    /// Relative violation needed to add a Benders cut.
    pub benders_tol: f64,
    /// Relative gap at which the aggregated-MIP algorithm stops.
    pub alg1_epsilon: f64,
    pub execution: Execution,
    /// Benders dual decomposition: ignore the stall rule and stop only when
    /// no violated Lagrangian cut remains.
    pub saturate: bool,
    /// Solve the final master with integrality restored and report its bound.
    pub final_mip_master: bool,
    pub dual_scaling: DualScaling,
    /// Node/time limits for aggregated MIPs and the final MIP master.
    pub master_limits: MipLimits,
    /// Hard cap on master solves.
    pub max_rounds: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algorithm: Algorithm::Apblagc,
            kappa1: 0.2,
            delta: DeltaSchedule::default(),
            stall_window: 5,
            stall_fraction: 0.05,
            time_limit: Duration::from_secs(3600),
            separation: SeparationConfig::default(),
            benders_tol: 1e-9,
            alg1_epsilon: 1e-6,
            execution: Execution::default(),
            saturate: false,
            final_mip_master: false,
            dual_scaling: DualScaling::default(),
            master_limits: MipLimits {
                time: Duration::from_secs(3600),
                nodes: 200_000,
            },
            max_rounds: 100_000,
        }
    }
}

impl RunConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        RunConfig {
            algorithm,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.kappa1 > 0.0) {
            return bad("kappa1 must be > 0");
        }
        if self.stall_window == 0 {
            return bad("stall window must be at least 1");
        }
        if !(self.stall_fraction > 0.0 && self.stall_fraction < 1.0) {
            return bad("stall fraction must lie in (0, 1)");
        }
        if !(self.delta.coefficient > 0.0) {
            return bad("delta coefficient must be > 0");
        }
        if self.separation.budget == 0 {
            return bad("separation budget must be at least 1");
        }
        if !(self.alg1_epsilon >= 0.0) {
            return bad("alg1 epsilon must be ≥ 0");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    /// No violated Benders cut remains.
    Converged,
    /// No violated Lagrangian cut remains.
    NoViolatedCut,
    /// Stall rule of Benders dual decomposition.
    Stall,
    GapClosed,
    /// Progress under the latest partition fell below `κ₁` of the total.
    KappaStop,
    RefinementExhausted,
    TimeLimit,
    RoundLimit,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::NoViolatedCut => "no_violated_cut",
            Termination::Stall => "stall",
            Termination::GapClosed => "gap_closed",
            Termination::KappaStop => "kappa_stop",
            Termination::RefinementExhausted => "refinement_exhausted",
            Termination::TimeLimit => "time_limit",
            Termination::RoundLimit => "round_limit",
        }
    }
}

/// A partition-based Benders cut and the dual it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct PbBenCRecord {
    pub cluster: Vec<usize>,
    pub duals: Vec<f64>,
    pub cut: Cut,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub trace: RunTrace,
    pub termination: Termination,
    /// Best lower bound seen.
    pub lower_bound: f64,
    pub upper_bound: Option<f64>,
    pub cuts: Vec<Cut>,
    /// Final partition; per-scenario methods report singletons.
    pub partition: Partition,
    pub refinements: usize,
    /// Last master (or aggregated problem) first-stage point.
    pub x: Vec<f64>,
    pub theta: Vec<f64>,
    pub pbbenc_log: Vec<PbBenCRecord>,
    /// Separations that hit their budget without a verdict.
    pub inconclusive_separations: usize,
    pub inner_calls: usize,
    pub mip_master_bound: Option<f64>,
}

pub fn run(instance: &Instance, config: &RunConfig) -> Result<RunResult> {
    match config.algorithm {
        Algorithm::Benders => run_benders(instance, config),
        Algorithm::Bdd => run_bdd(instance, config),
        Algorithm::Alg1 => run_alg1(instance, config),
        Algorithm::Apblagc => run_apblagc(instance, config),
    }
}

/// `len > window` and the last `window` entries gained at most
/// `fraction` of the progress since the first entry.
pub fn stalled(lb: &[f64], window: usize, fraction: f64) -> bool {
    if lb.len() <= window {
        return false;
    }
    let last = lb[lb.len() - 1];
    last - lb[lb.len() - 1 - window] <= fraction * (last - lb[0])
}

struct Run<'a> {
    instance: &'a Instance,
    config: &'a RunConfig,
    start: Instant,
    state: MasterState<'a>,
    trace: RunTrace,
    best_lb: f64,
    upper: Option<f64>,
    partition_size: usize,
    refinements: usize,
    master_solves: usize,
    pbbenc_log: Vec<PbBenCRecord>,
    inconclusive: usize,
    inner_calls: usize,
}

impl<'a> Run<'a> {
    fn new(instance: &'a Instance, config: &'a RunConfig, with_master: bool) -> Result<Self> {
        config.validate()?;
        instance.ensure_valid()?;
        let start = Instant::now();
        let lower = if with_master {
            recourse_lower_bounds(instance, config.execution)?
        } else {
            vec![0.0; instance.num_scenarios()]
        };
        Ok(Run {
            instance,
            config,
            start,
            state: MasterState::new(instance, lower),
            trace: RunTrace::default(),
            best_lb: f64::NEG_INFINITY,
            upper: None,
            partition_size: instance.num_scenarios(),
            refinements: 0,
            master_solves: 0,
            pbbenc_log: Vec::new(),
            inconclusive: 0,
            inner_calls: 0,
        })
    }

    fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    fn out_of_time(&self) -> bool {
        self.elapsed() >= self.config.time_limit
    }

    fn remaining(&self) -> Duration {
        self.config.time_limit.saturating_sub(self.elapsed())
    }

    fn limited(&self, limits: MipLimits) -> MipLimits {
        MipLimits {
            time: limits.time.min(self.remaining()),
            nodes: limits.nodes,
        }
    }

    fn record(&mut self, kind: EventKind, lb: f64, detail: String) {
        if lb > self.best_lb {
            self.best_lb = lb;
        }
        let wall = self.elapsed().as_secs_f64();
        let wall = self.trace.last().map_or(wall, |e| wall.max(e.wall_seconds));
        self.trace.events.push(TraceEvent {
            wall_seconds: wall,
            kind,
            lower_bound: self.best_lb,
            upper_bound: self.upper,
            cuts: CutCounts::of(&self.state.cuts),
            partition_size: self.partition_size,
            refinements: self.refinements,
            detail,
        });
    }

    fn solve_master(&mut self) -> Result<f64> {
        self.master_solves += 1;
        let sol = solve_master(&mut self.state, true, self.config.master_limits)?;
        Ok(sol.objective)
    }

    fn limit_hit(&self) -> Option<Termination> {
        if self.out_of_time() {
            Some(Termination::TimeLimit)
        } else if self.master_solves >= self.config.max_rounds {
            Some(Termination::RoundLimit)
        } else {
            None
        }
    }

    /// Benders rounds until no violated cut is found. `aggs` selects
    /// partition-based cuts.
    fn saturate_benders(&mut self, aggs: Option<&[AggregatedScenario]>) -> Result<Option<Termination>> {
        loop {
            if let Some(t) = self.limit_hit() {
                return Ok(Some(t));
            }
            let lb = self.solve_master()?;
            let out: RoundOutcome = match aggs {
                Some(a) => {
                    let out = cluster_benders_round(
                        &mut self.state,
                        a,
                        self.config.benders_tol,
                        self.config.execution,
                    )?;
                    self.log_pbbencs(a, &out);
                    out
                }
                None => scenario_benders_round(
                    &mut self.state,
                    self.config.benders_tol,
                    self.config.execution,
                )?,
            };
            debug!("benders round: lb {lb}, {} new cuts", out.added);
            self.record(
                EventKind::BendersRound,
                lb,
                format!("added={} duplicates={}", out.added, out.duplicates),
            );
            if out.added == 0 {
                return Ok(None);
            }
        }
    }

    fn log_pbbencs(&mut self, aggs: &[AggregatedScenario], out: &RoundOutcome) {
        for (a, r) in aggs.iter().zip(&out.results) {
            if !r.feasible {
                continue;
            }
            if let Some(cut) = self
                .state
                .cuts
                .iter()
                .rev()
                .take(out.added)
                .find(|c| c.kind == CutKind::PbBenC && c.origin == a.cluster)
            {
                self.pbbenc_log.push(PbBenCRecord {
                    cluster: a.cluster.clone(),
                    duals: r.duals.clone(),
                    cut: cut.clone(),
                });
            }
        }
    }

    /// One separation pass over `targets`; returns the number of new cuts.
    fn lagrangian_round(&mut self, targets: &[Target]) -> Result<usize> {
        let mut sep = self.config.separation;
        sep.inner_limits = self.limited(sep.inner_limits);
        let x = self.state.x.clone();
        let thetas: Vec<f64> = targets
            .iter()
            .map(|t| {
                let w = self.instance.theta_weights(&t.data.cluster)?;
                Ok(self.state.cluster_theta(&w))
            })
            .collect::<Result<_>>()?;
        let indexed: Vec<(usize, &Target)> = targets.iter().enumerate().collect();
        let outcomes = map_collect(&indexed, self.config.execution, |&(i, t)| {
            separate(self.instance, t, &x, thetas[i], &sep)
        });
        let mut added = 0;
        for o in outcomes {
            let o = o?;
            self.inner_calls += o.inner_calls;
            if o.status == SeparationStatus::BudgetExceeded {
                self.inconclusive += 1;
            }
            if let Some(cut) = o.cut {
                if self.state.add_cut(cut) {
                    added += 1;
                }
            }
        }
        Ok(added)
    }

    fn finish(
        mut self,
        algorithm: Algorithm,
        termination: Termination,
        partition: Partition,
    ) -> Result<RunResult> {
        let mut detail = termination.name().to_string();
        let mut mip_master_bound = None;
        if self.config.final_mip_master && algorithm != Algorithm::Alg1 {
            let limits = self.limited(self.config.master_limits);
            let mut state = self.state.clone();
            let sol = solve_master(&mut state, false, limits)?;
            mip_master_bound = Some(sol.bound);
            detail.push_str(&format!(" mip_master_bound={}", sol.bound));
        }
        let lb = self.best_lb;
        self.record(EventKind::Termination, lb, detail);
        Ok(RunResult {
            algorithm,
            termination,
            lower_bound: self.best_lb,
            upper_bound: self.upper,
            cuts: self.state.cuts,
            partition,
            refinements: self.refinements,
            x: self.state.x,
            theta: self.state.theta,
            pbbenc_log: self.pbbenc_log,
            inconclusive_separations: self.inconclusive,
            inner_calls: self.inner_calls,
            mip_master_bound,
            trace: self.trace,
        })
    }

    /// Scenario duals at the current first-stage point (Farkas rays for
    /// infeasible scenarios).
    fn scenario_duals(&self, x: &[f64]) -> Result<BTreeMap<usize, Vec<f64>>> {
        let results = solve_all_scenarios(self.instance, x, self.config.execution)?;
        Ok(results
            .into_iter()
            .map(|r| {
                let d = if r.feasible {
                    r.duals
                } else {
                    r.farkas.unwrap_or_default()
                };
                (r.cluster[0], d)
            })
            .collect())
    }

    /// Refines with `delta`, retrying once with `delta / 2` when nothing
    /// splits.
    fn refine(
        &self,
        partition: &Partition,
        duals: &BTreeMap<usize, Vec<f64>>,
        delta: f64,
    ) -> Result<Option<Partition>> {
        for d in [delta, delta / 2.0] {
            let p = partition.refine(duals, d, self.config.dual_scaling)?;
            if p.len() > partition.len() {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }
}

/// Multi-cut Benders on the LP relaxation.
pub fn run_benders(instance: &Instance, config: &RunConfig) -> Result<RunResult> {
    let mut run = Run::new(instance, config, true)?;
    let singletons = Partition::singletons(instance.num_scenarios());
    let t = run.saturate_benders(None)?.unwrap_or(Termination::Converged);
    run.finish(Algorithm::Benders, t, singletons)
}

/// Benders dual decomposition: Benders rounds to saturation alternating with
/// one per-scenario Lagrangian round.
pub fn run_bdd(instance: &Instance, config: &RunConfig) -> Result<RunResult> {
    let mut run = Run::new(instance, config, true)?;
    let singletons = Partition::singletons(instance.num_scenarios());
    let targets: Vec<Target> = (0..instance.num_scenarios())
        .map(|s| Target::scenario(instance, s))
        .collect::<Result<_>>()?;
    let mut lbs = Vec::new();
    let termination = loop {
        if let Some(t) = run.saturate_benders(None)? {
            break t;
        }
        let added = run.lagrangian_round(&targets)?;
        let lb = run.solve_master()?;
        lbs.push(lb);
        run.record(EventKind::LagrangianRound, lb, format!("added={added}"));
        if added == 0 {
            break Termination::NoViolatedCut;
        }
        if !config.saturate && stalled(&lbs, config.stall_window, config.stall_fraction) {
            break Termination::Stall;
        }
        if let Some(t) = run.limit_hit() {
            break t;
        }
    };
    run.finish(Algorithm::Bdd, termination, singletons)
}

/// Adaptive partition-based algorithm: solve the aggregated MIP, evaluate
/// the scenarios at its solution for an upper bound, refine by duals.
pub fn run_alg1(instance: &Instance, config: &RunConfig) -> Result<RunResult> {
    let mut run = Run::new(instance, config, false)?;
    let mut partition = Partition::single(instance.num_scenarios());
    let termination = loop {
        run.partition_size = partition.len();
        if let Some(t) = run.limit_hit() {
            break t;
        }
        run.master_solves += 1;
        let mip = partition_problem(instance, &partition)?;
        let r = solve_mip_with(&mip, run.limited(config.master_limits))?;
        let point = match (r.status, r.point) {
            (MipStatus::Infeasible, _) => return Err(Error::MasterInfeasible),
            (MipStatus::Unbounded, _) => return Err(Error::MasterUnbounded),
            (_, Some(p)) => p,
            (_, None) => break Termination::TimeLimit,
        };
        let z_n = r.bound;
        let x = point[..instance.n1()].to_vec();
        let results = solve_all_scenarios(instance, &x, config.execution)?;
        if results.iter().all(|r| r.feasible) {
            let value = dot(&instance.first_stage_cost, &x)
                + results
                    .iter()
                    .map(|r| instance.scenarios[r.cluster[0]].probability * r.value)
                    .sum::<f64>();
            run.upper = Some(run.upper.map_or(value, |u: f64| u.min(value)));
        }
        run.state.x.clone_from(&x);
        run.record(EventKind::BendersRound, z_n, format!("aggregated_objective={}", r.objective));
        if let Some(ub) = run.upper {
            let gap = (ub - run.best_lb) / ub.abs().max(1e-10);
            if gap <= config.alg1_epsilon {
                break Termination::GapClosed;
            }
        }
        let duals: BTreeMap<usize, Vec<f64>> = results
            .into_iter()
            .map(|r| (r.cluster[0], if r.feasible { r.duals } else { r.farkas.unwrap_or_default() }))
            .collect();
        match run.refine(&partition, &duals, EXACT_DUAL_DELTA)? {
            Some(p) => {
                partition = p;
                run.refinements += 1;
                run.partition_size = partition.len();
                let lb = run.best_lb;
                run.record(EventKind::Refinement, lb, format!("clusters={}", partition.len()));
            }
            None => break Termination::RefinementExhausted,
        }
    };
    run.finish(Algorithm::Alg1, termination, partition)
}

/// Adaptive partition-based Lagrangian cuts: saturate partition-based
/// Benders cuts, add one partition-based Lagrangian cut per cluster and
/// round, refine the partition when progress stalls.
pub fn run_apblagc(instance: &Instance, config: &RunConfig) -> Result<RunResult> {
    let mut run = Run::new(instance, config, true)?;
    let mut partition = Partition::single(instance.num_scenarios());
    let mut first_lb: Option<f64> = None;
    let termination = 'outer: loop {
        run.partition_size = partition.len();
        let aggs = aggregate_all(instance, &partition)?;
        let targets: Vec<Target> = aggs.iter().cloned().map(Target::cluster).collect();
        let mut lbs: Vec<f64> = Vec::new();
        loop {
            if let Some(t) = run.saturate_benders(Some(&aggs))? {
                break 'outer t;
            }
            let added = run.lagrangian_round(&targets)?;
            let lb = run.solve_master()?;
            lbs.push(lb);
            first_lb.get_or_insert(lb);
            run.record(EventKind::LagrangianRound, lb, format!("added={added}"));
            if added == 0 || stalled(&lbs, config.stall_window, config.stall_fraction) {
                break;
            }
            if let Some(t) = run.limit_hit() {
                break 'outer t;
            }
        }
        let last = *lbs.last().expect("at least one round");
        let total = last - first_lb.expect("set in the first round");
        if run.refinements >= 1 && last - lbs[0] < config.kappa1 * total {
            break Termination::KappaStop;
        }
        if let Some(t) = run.limit_hit() {
            break t;
        }
        let duals = run.scenario_duals(&run.state.x.clone())?;
        let delta = config.delta.delta(run.refinements + 1)?;
        match run.refine(&partition, &duals, delta)? {
            Some(p) => {
                partition = p;
                run.refinements += 1;
                run.partition_size = partition.len();
                let lb = run.best_lb;
                run.record(
                    EventKind::Refinement,
                    lb,
                    format!("delta={delta} clusters={}", partition.len()),
                );
            }
            None => break Termination::RefinementExhausted,
        }
    };
    run.finish(Algorithm::Apblagc, termination, partition)
}

/// Best bound of the master LP after adding every violated cut of the given
/// partition-based Lagrangian family until none remains, with partition-based
/// Benders cuts alongside. Used to measure the closure of a fixed partition.
pub fn partition_closure(
    instance: &Instance,
    partition: &Partition,
    config: &RunConfig,
) -> Result<RunResult> {
    let mut run = Run::new(instance, config, true)?;
    run.partition_size = partition.len();
    let aggs = aggregate_all(instance, partition)?;
    let targets: Vec<Target> = aggs.iter().cloned().map(Target::cluster).collect();
    let termination = loop {
        if let Some(t) = run.saturate_benders(Some(&aggs))? {
            break t;
        }
        let added = run.lagrangian_round(&targets)?;
        let lb = run.solve_master()?;
        run.record(EventKind::LagrangianRound, lb, format!("added={added}"));
        if added == 0 {
            break Termination::NoViolatedCut;
        }
    };
    run.finish(Algorithm::Apblagc, termination, partition.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::builtin;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-6
    }

    #[test]
    fn stall_rule() {
        assert!(!stalled(&[0.0, 1.0, 2.0], 5, 0.05));
        assert!(stalled(&[0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0], 5, 0.05));
        assert!(!stalled(&[0.0, 1.0, 1.0, 1.0, 1.0, 1.0], 5, 0.05));
        assert!(!stalled(&[0.0, 0.5, 0.6, 0.7, 0.8, 1.0], 5, 0.05));
        // No progress at all counts as stalled.
        assert!(stalled(&[0.0; 6], 5, 0.05));
    }

    #[test]
    fn thm1_bounds() {
        let inst = builtin("thm1").unwrap();
        let b = run_benders(&inst, &RunConfig::new(Algorithm::Benders)).unwrap();
        assert!(close(b.lower_bound, 0.0), "benders {}", b.lower_bound);
        let d = run_bdd(&inst, &RunConfig::new(Algorithm::Bdd)).unwrap();
        assert!(close(d.lower_bound, 0.0), "bdd {}", d.lower_bound);
        let a = run_apblagc(&inst, &RunConfig::new(Algorithm::Apblagc)).unwrap();
        assert!(close(a.lower_bound, 0.5), "apblagc {}", a.lower_bound);
        assert_eq!(a.partition.len(), 1);
        assert_eq!(a.refinements, 0);
    }

    #[test]
    fn thm1_alg1_stops_at_once() {
        let inst = builtin("thm1").unwrap();
        let r = run_alg1(&inst, &RunConfig::new(Algorithm::Alg1)).unwrap();
        assert_eq!(r.termination, Termination::GapClosed);
        assert!(close(r.lower_bound, 0.5));
        assert_eq!(r.upper_bound.map(|u| close(u, 0.5)), Some(true));
        assert_eq!(r.refinements, 0);
    }

    #[test]
    fn alg1_infinite_epsilon_single_iteration() {
        let inst = builtin("refinement-example").unwrap();
        let mut cfg = RunConfig::new(Algorithm::Alg1);
        cfg.alg1_epsilon = f64::INFINITY;
        let r = run_alg1(&inst, &cfg).unwrap();
        assert_eq!(r.refinements, 0);
        assert_eq!(r.termination, Termination::GapClosed);
    }

    #[test]
    fn traces_are_monotone() {
        let inst = builtin("refinement-example").unwrap();
        for algo in Algorithm::ALL {
            let r = run(&inst, &RunConfig::new(algo)).unwrap();
            assert_eq!(r.trace.check_monotone(), Ok(()), "{}", algo.name());
            assert_eq!(r.trace.last().unwrap().kind, EventKind::Termination);
        }
    }

    #[test]
    fn invalid_config_is_rejected() {
        let inst = builtin("thm1").unwrap();
        let mut cfg = RunConfig::new(Algorithm::Apblagc);
        cfg.kappa1 = 0.0;
        assert!(matches!(run(&inst, &cfg), Err(Error::InvalidConfig(_))));
    }
}
