//! Brute-force checkers for cut validity, dominance, closure bounds and
//! refinement monotonicity. They take instances, partitions, cuts and duals
//! as plain data and recompute what they need through the LP/MIP cores and
//! binary enumeration.

use std::fmt;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::drivers::{partition_closure, run_bdd, run_benders, Algorithm, RunConfig};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpModel, LpStatus, Sense};
use crate::mip::{enumerate_binary, solve_mip_with, MipLimits, MipModel, MipStatus};
use crate::model::{dot, Cut, Instance, VarKind, CUT_VALIDITY_TOL};
use crate::partition::{partition_problem, Partition};

/// Largest number of binary assignments the checkers will enumerate.
pub const ENUMERATION_CAP: u128 = 4096;
const BOUND_TOL: f64 = 1e-6;
const IDENTITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// A budget ran out before the check could decide.
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub check: String,
    pub instance: String,
    pub verdict: Verdict,
    pub worst_violation: f64,
    pub witness: Option<Vec<f64>>,
    pub detail: String,
}

impl VerificationReport {
    fn new(check: &str, instance: &str) -> Self {
        VerificationReport {
            check: check.to_string(),
            instance: instance.to_string(),
            verdict: Verdict::Pass,
            worst_violation: 0.0,
            witness: None,
            detail: String::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} check={} instance={} worst_violation={:e}",
            self.verdict.name(),
            self.check,
            self.instance,
            self.worst_violation
        )?;
        if let Some(w) = &self.witness {
            write!(f, " witness={w:?}")?;
        }
        if !self.detail.is_empty() {
            write!(f, " detail=\"{}\"", self.detail)?;
        }
        Ok(())
    }
}

/// Feasible binary first-stage points with their per-scenario recourse
/// values `f_s(x)`, read off the best completion of the extensive form.
pub fn feasible_points(instance: &Instance) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    if let Some(j) = instance
        .integrality
        .iter()
        .position(|k| *k != VarKind::Binary)
    {
        return Err(Error::Precondition(format!(
            "enumeration needs a purely binary first stage (x[{j}] is not binary)"
        )));
    }
    let n1 = instance.n1();
    let n2 = instance.n2();
    let points = enumerate_binary(&instance.build_extensive(), ENUMERATION_CAP)?;
    Ok(points
        .into_iter()
        .map(|(p, _)| {
            let x = p[..n1].to_vec();
            let f = (0..instance.num_scenarios())
                .map(|s| dot(&instance.second_stage_cost, &p[n1 + s * n2..n1 + (s + 1) * n2]))
                .collect();
            (x, f)
        })
        .collect())
}

/// Extensive-form optimum by enumeration.
pub fn extensive_optimum(instance: &Instance) -> Result<f64> {
    let points = enumerate_binary(&instance.build_extensive(), ENUMERATION_CAP)?;
    points
        .first()
        .map(|p| p.1)
        .ok_or_else(|| Error::Precondition("extensive form is infeasible".into()))
}

/// Every cut must hold at every feasible `(x, θ)` with `θ_s = f_s(x)`.
pub fn check_cut_validity(instance: &Instance, name: &str, cuts: &[Cut]) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("cut_validity", name);
    if cuts.is_empty() {
        rep.detail = "no cuts".into();
        return Ok(rep);
    }
    let points = feasible_points(instance)?;
    let mut worst = 0.0f64;
    for (x, theta) in &points {
        for (i, cut) in cuts.iter().enumerate() {
            let slack = cut.slack(x, theta);
            if -slack > worst {
                worst = -slack;
                if slack < -CUT_VALIDITY_TOL {
                    rep.witness = Some(x.clone());
                    rep.detail = format!("cut {i} ({}) slack {slack}", cut.kind.name());
                }
            }
        }
    }
    rep.worst_violation = worst;
    if worst > CUT_VALIDITY_TOL {
        rep.verdict = Verdict::Fail;
    } else {
        rep.detail = format!("{} cuts at {} points", cuts.len(), points.len());
    }
    Ok(rep)
}

/// The partition-based Benders cut from dual `λ` must equal the
/// probability-weighted sum of the per-scenario Benders cuts from the same
/// dual, coefficient by coefficient.
pub fn check_pbbenc_dominance(
    instance: &Instance,
    name: &str,
    pbbenc: &Cut,
    duals: &[f64],
) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("pbbenc_dominance", name);
    let cluster = &pbbenc.origin;
    instance.check_cluster(cluster)?;
    let mass: f64 = cluster.iter().map(|&s| instance.scenarios[s].probability).sum();

    let mut x_coeffs = vec![0.0; instance.n1()];
    let mut theta = vec![0.0; instance.num_scenarios()];
    let mut rhs = 0.0;
    for &s in cluster {
        let sc = &instance.scenarios[s];
        let w = sc.probability / mass;
        // θ_s ≥ λ·h_s − (λᵀT_s)·x
        for (r, j, v) in sc.technology.triplets() {
            x_coeffs[j] += w * duals[r] * v;
        }
        rhs += w * dot(duals, &sc.rhs);
        theta[s] += w;
    }
    let mut cut_theta = vec![0.0; instance.num_scenarios()];
    for &(s, c) in &pbbenc.theta_coeffs {
        cut_theta[s] += c;
    }
    let mut worst = 0.0f64;
    let mut cmp = |a: f64, b: f64| {
        let d = (a - b).abs() / a.abs().max(b.abs()).max(1.0);
        worst = worst.max(d);
    };
    for (a, b) in x_coeffs.iter().zip(&pbbenc.x_coeffs) {
        cmp(*a, *b);
    }
    for (a, b) in theta.iter().zip(&cut_theta) {
        cmp(*a, *b);
    }
    cmp(rhs, pbbenc.rhs);
    rep.worst_violation = worst;
    if worst > IDENTITY_TOL {
        rep.verdict = Verdict::Fail;
        rep.witness = Some(duals.to_vec());
        rep.detail = "weighted scenario cuts differ from the cluster cut".into();
    } else {
        rep.detail = format!("cluster {cluster:?}: identity holds, so the scenario cuts imply it");
    }
    Ok(rep)
}

/// Configuration for closure computations: saturation with tight
/// tolerances and a generous separation budget.
pub fn closure_config(algorithm: Algorithm) -> RunConfig {
    let mut cfg = RunConfig::new(algorithm);
    cfg.saturate = true;
    cfg.separation.budget = 500;
    cfg.separation.gap_tol = 1e-8;
    cfg.separation.violation_tol = 1e-8;
    cfg.time_limit = Duration::from_secs(600);
    cfg
}

/// Saturated per-scenario Lagrangian closure equals the extensive optimum
/// when there is a single integer first-stage variable.
pub fn check_dim1_no_gap(instance: &Instance, name: &str) -> Result<VerificationReport> {
    if instance.n1() != 1 || !instance.integrality[0].is_integer() {
        return Err(Error::Precondition(format!(
            "needs exactly one integer first-stage variable (n1 = {}, integer = {})",
            instance.n1(),
            instance.integer_count()
        )));
    }
    let mut rep = VerificationReport::new("dim1_no_gap", name);
    let optimum = if instance.integrality[0] == VarKind::Binary {
        extensive_optimum(instance)?
    } else {
        let r = solve_mip_with(&instance.build_extensive(), MipLimits::default())?;
        if r.status != MipStatus::Optimal {
            return Err(Error::Precondition("extensive form not solved to optimality".into()));
        }
        r.objective
    };
    let run = run_bdd(instance, &closure_config(Algorithm::Bdd))?;
    let gap = (optimum - run.lower_bound).abs();
    rep.worst_violation = gap;
    rep.detail = format!("closure {} optimum {optimum}", run.lower_bound);
    if gap > BOUND_TOL {
        rep.witness = Some(run.x.clone());
        rep.verdict = if run.inconclusive_separations > 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        };
    }
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosureBounds {
    /// LP relaxation bound from Benders cuts.
    pub benders: f64,
    /// Saturated per-scenario Lagrangian closure.
    pub lagrangian: f64,
    /// Saturated partition-based Lagrangian closure for the given partition.
    pub partition: f64,
    pub optimum: f64,
    pub inconclusive: bool,
}

pub fn closure_bounds(instance: &Instance, partition: &Partition) -> Result<ClosureBounds> {
    let b = run_benders(instance, &closure_config(Algorithm::Benders))?;
    let l = run_bdd(instance, &closure_config(Algorithm::Bdd))?;
    let p = partition_closure(instance, partition, &closure_config(Algorithm::Apblagc))?;
    Ok(ClosureBounds {
        benders: b.lower_bound,
        lagrangian: l.lower_bound,
        partition: p.lower_bound,
        optimum: extensive_optimum(instance)?,
        inconclusive: l.inconclusive_separations + p.inconclusive_separations > 0,
    })
}

/// On the two-scenario example the Benders and per-scenario Lagrangian
/// closures stay at 0 while the single-cluster partition-based Lagrangian
/// closure reaches the optimum 0.5.
pub fn check_thm1_strictness() -> Result<VerificationReport> {
    let inst = crate::instances::thm1();
    check_thm1_strictness_on(&inst, "thm1", &Partition::single(inst.num_scenarios()))
}

pub fn check_thm1_strictness_on(
    instance: &Instance,
    name: &str,
    partition: &Partition,
) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("thm1_strictness", name);
    let b = closure_bounds(instance, partition)?;
    let values = vec![b.benders, b.lagrangian, b.partition, b.optimum];
    rep.detail = format!(
        "benders={} lagrangian={} partition={} optimum={}",
        b.benders, b.lagrangian, b.partition, b.optimum
    );
    let dev = [
        b.benders.abs(),
        b.lagrangian.abs(),
        (b.partition - 0.5).abs(),
        (b.partition - b.optimum).abs(),
    ];
    rep.worst_violation = dev.iter().fold(0.0f64, |a, &d| a.max(d));
    if rep.worst_violation > BOUND_TOL {
        rep.verdict = if b.inconclusive {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        };
        rep.witness = Some(values);
        if (b.benders - b.lagrangian).abs() <= BOUND_TOL
            && (b.lagrangian - b.partition).abs() <= BOUND_TOL
        {
            rep.detail.push_str(" (example degenerate)");
        }
    }
    Ok(rep)
}

/// Values of the aggregated problem along `chain` never decrease, and a
/// final all-singleton partition reproduces the extensive optimum.
pub fn check_refinement_monotone(
    instance: &Instance,
    name: &str,
    chain: &[Partition],
) -> Result<VerificationReport> {
    for w in chain.windows(2) {
        if !w[1].is_refinement(&w[0])? {
            return Err(Error::InvalidPartition("not a refinement chain".into()));
        }
    }
    let mut rep = VerificationReport::new("refinement_monotone", name);
    let mut values = Vec::with_capacity(chain.len());
    for p in chain {
        let r = solve_mip_with(&partition_problem(instance, p)?, MipLimits::default())?;
        if r.status != MipStatus::Optimal {
            return Err(Error::Precondition(format!(
                "aggregated problem for {} clusters ended {:?}",
                p.len(),
                r.status
            )));
        }
        values.push(r.objective);
    }
    let mut worst = 0.0f64;
    for w in values.windows(2) {
        worst = worst.max(w[0] - w[1]);
    }
    if let Some(last) = chain.last() {
        if last.len() == instance.num_scenarios() {
            let opt = solve_mip_with(&instance.build_extensive(), MipLimits::default())?;
            worst = worst.max((opt.objective - values[values.len() - 1]).abs());
        }
    }
    rep.worst_violation = worst;
    rep.detail = format!("values {values:?}");
    if worst > BOUND_TOL {
        rep.verdict = Verdict::Fail;
        rep.witness = Some(values);
    }
    Ok(rep)
}

/// A chain `{S} → … → singletons` where each step splits one random
/// non-singleton cluster in two.
pub fn random_refinement_chain(universe: usize, seed: u64) -> Vec<Partition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chain = vec![Partition::single(universe)];
    loop {
        let cur = chain.last().expect("nonempty chain");
        let splittable: Vec<usize> = (0..cur.len()).filter(|&k| cur.clusters()[k].len() > 1).collect();
        let Some(&k) = splittable.choose(&mut rng) else {
            break;
        };
        let mut members = cur.clusters()[k].clone();
        members.shuffle(&mut rng);
        let cut = rng.gen_range(1..members.len());
        let mut clusters: Vec<Vec<usize>> = cur.clusters().to_vec();
        clusters[k] = members[..cut].to_vec();
        clusters.push(members[cut..].to_vec());
        chain.push(Partition::from_clusters(universe, clusters).expect("split of a partition"));
    }
    chain
}

/// Vertices `(x_v, f_s(x_v))` of the epigraph hull of one scenario.
pub fn scenario_vertices(instance: &Instance, s: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    instance.check_cluster(&[s])?;
    let sc = &instance.scenarios[s];
    let mut lp = LpModel::new();
    let xs = instance.add_first_stage(&mut lp, &vec![0.0; instance.n1()]);
    instance.add_recourse_block(&mut lp, &xs, &sc.technology, &sc.rhs, 1.0);
    let integer = instance.integer_marks(lp.num_vars());
    let points = enumerate_binary(&MipModel { lp, integer }, ENUMERATION_CAP)?;
    Ok(points
        .into_iter()
        .map(|(p, v)| (p[..instance.n1()].to_vec(), v))
        .collect())
}

/// Smallest `t ≥ 0` such that `(x̂, θ̂ + t)` is within `t` (max-norm on `x`)
/// of a convex combination of the scenario's epigraph vertices; zero means
/// `(x̂, θ̂)` lies in the hull.
pub fn hull_distance(vertices: &[(Vec<f64>, f64)], x: &[f64], theta: f64) -> Result<f64> {
    if vertices.is_empty() {
        return Err(Error::Precondition("no feasible vertices".into()));
    }
    let mut lp = LpModel::new();
    let mu: Vec<usize> = vertices.iter().map(|_| lp.add_var(0.0, 0.0, f64::INFINITY)).collect();
    let t = lp.add_var(1.0, 0.0, f64::INFINITY);
    lp.add_constraint(mu.iter().map(|&m| (m, 1.0)).collect(), Sense::Eq, 1.0);
    for j in 0..x.len() {
        let row: Vec<(usize, f64)> = mu.iter().zip(vertices).map(|(&m, v)| (m, v.0[j])).collect();
        let mut up = row.clone();
        up.push((t, -1.0));
        lp.add_constraint(up, Sense::Le, x[j]);
        let mut down = row;
        down.push((t, 1.0));
        lp.add_constraint(down, Sense::Ge, x[j]);
    }
    let mut cost: Vec<(usize, f64)> = mu.iter().zip(vertices).map(|(&m, v)| (m, v.1)).collect();
    cost.push((t, -1.0));
    lp.add_constraint(cost, Sense::Le, theta);
    let r = solve_lp(&lp)?;
    match r.status {
        LpStatus::Optimal => Ok(r.objective),
        other => Err(Error::NumericalBreakdown(format!("hull LP ended {other:?}"))),
    }
}

/// `(x̂, θ̂_s)` lies in the convex hull of the scenario's feasible set.
pub fn check_hull_membership(
    instance: &Instance,
    name: &str,
    s: usize,
    x: &[f64],
    theta: f64,
) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("hull_membership", name);
    let d = hull_distance(&scenario_vertices(instance, s)?, x, theta)?;
    rep.worst_violation = d;
    rep.detail = format!("scenario {s}");
    if d > BOUND_TOL {
        rep.verdict = Verdict::Fail;
        let mut w = x.to_vec();
        w.push(theta);
        rep.witness = Some(w);
    }
    Ok(rep)
}

/// The aggregated recourse value never exceeds the weighted scenario
/// values at the same first-stage point.
pub fn check_aggregation_bound(
    instance: &Instance,
    name: &str,
    cluster: &[usize],
    x: &[f64],
) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("aggregation_bound", name);
    let weights = instance.theta_weights(cluster)?;
    let recourse = |t: &crate::sparse::CsrMatrix, h: &[f64]| -> Result<f64> {
        let tx = t.mul_vec(x);
        let mut lp = LpModel::new();
        for &d in &instance.second_stage_cost {
            lp.add_var(d, 0.0, f64::INFINITY);
        }
        for i in 0..instance.m2() {
            lp.add_constraint(instance.recourse.row(i).collect(), Sense::Ge, h[i] - tx[i]);
        }
        let r = solve_lp(&lp)?;
        Ok(match r.status {
            LpStatus::Optimal => r.objective,
            LpStatus::Infeasible => f64::INFINITY,
            LpStatus::Unbounded => f64::NEG_INFINITY,
        })
    };
    let mut weighted = 0.0;
    for &(s, w) in &weights {
        let sc = &instance.scenarios[s];
        weighted += w * recourse(&sc.technology, &sc.rhs)?;
    }
    let agg = crate::partition::aggregate(instance, cluster)?;
    let value = recourse(&agg.technology, &agg.rhs)?;
    let excess = value - weighted;
    rep.worst_violation = excess.max(0.0);
    rep.detail = format!("aggregated {value} weighted {weighted}");
    if excess > BOUND_TOL * (1.0 + weighted.abs()) {
        rep.verdict = Verdict::Fail;
        rep.witness = Some(x.to_vec());
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::builtin;
    use crate::model::CutKind;

    fn thm1_cut(rhs: f64) -> Cut {
        Cut {
            kind: CutKind::PbLagC,
            x_coeffs: vec![0.0, 0.0],
            theta_coeffs: vec![(0, 0.5), (1, 0.5)],
            rhs,
            origin: vec![0, 1],
        }
    }

    #[test]
    fn validity_pass_and_fail() {
        let inst = builtin("thm1").unwrap();
        assert!(check_cut_validity(&inst, "thm1", &[thm1_cut(0.5)]).unwrap().passed());
        let bad = check_cut_validity(&inst, "thm1", &[thm1_cut(0.6)]).unwrap();
        assert_eq!(bad.verdict, Verdict::Fail);
        assert_eq!(bad.witness, Some(vec![0.0, 0.0]));
        assert!(check_cut_validity(&inst, "thm1", &[]).unwrap().passed());
    }

    #[test]
    fn dominance_identity_thm1() {
        let inst = builtin("thm1").unwrap();
        let cut = Cut {
            kind: CutKind::PbBenC,
            x_coeffs: vec![0.0, 1.0],
            theta_coeffs: vec![(0, 0.5), (1, 0.5)],
            rhs: 0.5,
            origin: vec![0, 1],
        };
        let rep = check_pbbenc_dominance(&inst, "thm1", &cut, &[1.0, 0.0]).unwrap();
        assert!(rep.passed(), "{rep}");
        let mut wrong = cut.clone();
        wrong.rhs = 0.4;
        assert!(!check_pbbenc_dominance(&inst, "thm1", &wrong, &[1.0, 0.0]).unwrap().passed());
    }

    #[test]
    fn dim1_guard() {
        let inst = builtin("thm1").unwrap();
        assert!(matches!(check_dim1_no_gap(&inst, "thm1"), Err(Error::Precondition(_))));
    }

    #[test]
    fn thm1_monotone_chain() {
        let inst = builtin("thm1").unwrap();
        let chain = vec![Partition::single(2), Partition::singletons(2)];
        let rep = check_refinement_monotone(&inst, "thm1", &chain).unwrap();
        assert!(rep.passed(), "{rep}");
        let same = vec![Partition::single(2), Partition::single(2)];
        assert!(check_refinement_monotone(&inst, "thm1", &same).is_err());
    }

    #[test]
    fn random_chain_reaches_singletons() {
        let chain = random_refinement_chain(5, 3);
        assert_eq!(chain.len(), 5);
        assert_eq!(chain.last().unwrap().len(), 5);
        for w in chain.windows(2) {
            assert!(w[1].is_refinement(&w[0]).unwrap());
        }
    }

    #[test]
    fn hull_membership_thm1() {
        let inst = builtin("thm1").unwrap();
        let v = scenario_vertices(&inst, 0).unwrap();
        assert_eq!(v.len(), 4);
        // (½, ½, 0) = ½(0,0,0) + ½(1,1,0)
        assert!(hull_distance(&v, &[0.5, 0.5], 0.0).unwrap() < 1e-9);
        // Scenario 2: the midpoint of (1,0,0) and (0,1,0).
        assert!(hull_distance(&scenario_vertices(&inst, 1).unwrap(), &[0.5, 0.5], 0.0).unwrap() < 1e-9);
        assert!(hull_distance(&v, &[0.5, 0.5], -0.5).unwrap() > 0.1);
    }

    #[test]
    fn aggregation_bound_thm1() {
        let inst = builtin("thm1").unwrap();
        for x in [[0.0, 0.0], [0.5, 0.5], [1.0, 0.0]] {
            assert!(check_aggregation_bound(&inst, "thm1", &[0, 1], &x).unwrap().passed());
        }
    }
}
