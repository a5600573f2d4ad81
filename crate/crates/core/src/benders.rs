//! Recourse subproblems, Benders cuts (per scenario and per cluster) and the
//! master problem over `(x, θ_1, …, θ_|S|)`.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpModel, LpStatus, Sense};
use crate::mip::{solve_mip_with, MipLimits, MipModel, MipStatus};
use crate::model::{dot, Cut, CutKind, Instance, MasterState};
use crate::parallel::{map_collect, Execution};
use crate::partition::AggregatedScenario;
use crate::sparse::CsrMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct SubproblemResult {
    /// Scenario indices the data came from (one entry for a scenario).
    pub cluster: Vec<usize>,
    /// `f(x̂)`, `+∞` when infeasible.
    pub value: f64,
    /// Optimal duals of the `≥` rows (nonnegative) when feasible.
    pub duals: Vec<f64>,
    pub feasible: bool,
    /// Row multipliers proving infeasibility.
    pub farkas: Option<Vec<f64>>,
}

/// `min d·y  s.t.  W y ≥ h − T x̂, y ≥ 0`
fn recourse_lp(
    instance: &Instance,
    technology: &CsrMatrix,
    rhs: &[f64],
    x: &[f64],
) -> Result<(f64, Vec<f64>, bool, Option<Vec<f64>>)> {
    if x.len() != instance.n1() {
        return Err(Error::Precondition(format!(
            "first-stage point has length {}, expected {}",
            x.len(),
            instance.n1()
        )));
    }
    let tx = technology.mul_vec(x);
    let mut lp = LpModel::new();
    for &d in &instance.second_stage_cost {
        lp.add_var(d, 0.0, f64::INFINITY);
    }
    for i in 0..instance.m2() {
        lp.add_constraint(instance.recourse.row(i).collect(), Sense::Ge, rhs[i] - tx[i]);
    }
    let r = solve_lp(&lp)?;
    match r.status {
        LpStatus::Optimal => Ok((r.objective, r.duals, true, None)),
        LpStatus::Infeasible => Ok((f64::INFINITY, vec![0.0; instance.m2()], false, r.farkas)),
        LpStatus::Unbounded => Err(Error::Precondition(
            "recourse problem is unbounded below".into(),
        )),
    }
}

pub fn solve_scenario_subproblem(instance: &Instance, s: usize, x: &[f64]) -> Result<SubproblemResult> {
    instance.check_cluster(&[s])?;
    let sc = &instance.scenarios[s];
    let (value, duals, feasible, farkas) = recourse_lp(instance, &sc.technology, &sc.rhs, x)?;
    Ok(SubproblemResult {
        cluster: vec![s],
        value,
        duals,
        feasible,
        farkas,
    })
}

/// The recourse problem of an aggregated cluster (`T̄^P`, `h̄^P`).
pub fn solve_cluster_subproblem(
    instance: &Instance,
    agg: &AggregatedScenario,
    x: &[f64],
) -> Result<SubproblemResult> {
    let (value, duals, feasible, farkas) = recourse_lp(instance, &agg.technology, &agg.rhs, x)?;
    Ok(SubproblemResult {
        cluster: agg.cluster.clone(),
        value,
        duals,
        feasible,
        farkas,
    })
}

pub fn solve_all_scenarios(
    instance: &Instance,
    x: &[f64],
    exec: Execution,
) -> Result<Vec<SubproblemResult>> {
    let idx: Vec<usize> = (0..instance.num_scenarios()).collect();
    map_collect(&idx, exec, |&s| solve_scenario_subproblem(instance, s, x))
        .into_iter()
        .collect()
}

fn dual_cut(
    kind: CutKind,
    technology: &CsrMatrix,
    rhs: &[f64],
    duals: &[f64],
    theta_coeffs: Vec<(usize, f64)>,
    origin: Vec<usize>,
) -> Cut {
    Cut {
        kind,
        x_coeffs: technology.transpose_mul(duals),
        theta_coeffs,
        rhs: dot(duals, rhs),
        origin,
    }
}

/// `θ_s ≥ λ·h_s − (λᵀT_s)·x`, stored as `(λᵀT_s)·x + θ_s ≥ λ·h_s`.
pub fn make_benders_cut(instance: &Instance, s: usize, duals: &[f64]) -> Result<Cut> {
    instance.check_cluster(&[s])?;
    let sc = &instance.scenarios[s];
    Ok(dual_cut(CutKind::Benders, &sc.technology, &sc.rhs, duals, vec![(s, 1.0)], vec![s]))
}

/// `θ^P ≥ λ·h̄^P − (λᵀT̄^P)·x` with `θ^P` the weighted average over the cluster.
pub fn make_pbbenc(instance: &Instance, agg: &AggregatedScenario, duals: &[f64]) -> Result<Cut> {
    let weights = instance.theta_weights(&agg.cluster)?;
    Ok(dual_cut(
        CutKind::PbBenC,
        &agg.technology,
        &agg.rhs,
        duals,
        weights,
        agg.cluster.clone(),
    ))
}

/// From a Farkas ray `λ ≥ 0` with `Wᵀλ ≤ 0`: `(λᵀT)·x ≥ λ·h`.
pub fn make_feasibility_cut(
    technology: &CsrMatrix,
    rhs: &[f64],
    ray: &[f64],
    origin: Vec<usize>,
) -> Cut {
    dual_cut(CutKind::Feasibility, technology, rhs, ray, Vec::new(), origin)
}

/// Cut for a subproblem result: optimality cut when feasible, feasibility
/// cut otherwise. `agg` selects a partition-based cut.
pub fn cut_from_result(
    instance: &Instance,
    agg: Option<&AggregatedScenario>,
    result: &SubproblemResult,
) -> Result<Cut> {
    if result.feasible {
        return match agg {
            Some(a) => make_pbbenc(instance, a, &result.duals),
            None => make_benders_cut(instance, result.cluster[0], &result.duals),
        };
    }
    let ray = result.farkas.as_ref().ok_or_else(|| {
        Error::NumericalBreakdown("infeasible subproblem without certificate".into())
    })?;
    Ok(match agg {
        Some(a) => make_feasibility_cut(&a.technology, &a.rhs, ray, a.cluster.clone()),
        None => {
            let sc = &instance.scenarios[result.cluster[0]];
            make_feasibility_cut(&sc.technology, &sc.rhs, ray, result.cluster.clone())
        }
    })
}

/// `L_s = min d·y` over `x` in its box with `A x = b` and
/// `T_s x + W y ≥ h_s`, a finite lower bound on `f_s` over the first stage.
pub fn recourse_lower_bounds(instance: &Instance, exec: Execution) -> Result<Vec<f64>> {
    let idx: Vec<usize> = (0..instance.num_scenarios()).collect();
    map_collect(&idx, exec, |&s| {
        let sc = &instance.scenarios[s];
        let mut lp = LpModel::new();
        let xs = instance.add_first_stage(&mut lp, &vec![0.0; instance.n1()]);
        instance.add_recourse_block(&mut lp, &xs, &sc.technology, &sc.rhs, 1.0);
        let r = solve_lp(&lp)?;
        match r.status {
            LpStatus::Optimal => Ok(r.objective),
            LpStatus::Infeasible => Err(Error::InnerInfeasible(vec![s])),
            LpStatus::Unbounded => Err(Error::Precondition(format!(
                "recourse of scenario {s} is unbounded below over the first-stage box"
            ))),
        }
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MasterSolution {
    pub x: Vec<f64>,
    pub theta: Vec<f64>,
    pub objective: f64,
    /// Proven bound; equals `objective` unless a MIP master ran out of budget.
    pub bound: f64,
}

pub fn build_master(state: &MasterState) -> MipModel {
    let inst = state.instance;
    let mut lp = LpModel::new();
    let xs = inst.add_first_stage(&mut lp, &inst.first_stage_cost);
    let thetas: Vec<usize> = inst
        .scenarios
        .iter()
        .zip(&state.theta_lower)
        .map(|(sc, &l)| lp.add_var(sc.probability, l, f64::INFINITY))
        .collect();
    for cut in &state.cuts {
        let mut coeffs: Vec<(usize, f64)> = cut
            .x_coeffs
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, &v)| (xs[j], v))
            .collect();
        coeffs.extend(cut.theta_coeffs.iter().map(|&(s, v)| (thetas[s], v)));
        lp.add_constraint(coeffs, Sense::Ge, cut.rhs);
    }
    let integer = inst.integer_marks(lp.num_vars());
    MipModel { lp, integer }
}

/// Solves the master (LP relaxation when `relax_integrality`), stores the
/// point and bound in `state` and returns them.
pub fn solve_master(
    state: &mut MasterState,
    relax_integrality: bool,
    limits: MipLimits,
) -> Result<MasterSolution> {
    let model = build_master(state);
    let n1 = state.instance.n1();
    let (point, objective, bound) = if relax_integrality {
        let r = solve_lp(&model.lp)?;
        match r.status {
            LpStatus::Optimal => (r.x, r.objective, r.objective),
            LpStatus::Infeasible => return Err(Error::MasterInfeasible),
            LpStatus::Unbounded => return Err(Error::MasterUnbounded),
        }
    } else {
        let r = solve_mip_with(&model, limits)?;
        match (r.status, r.point) {
            (MipStatus::Infeasible, _) => return Err(Error::MasterInfeasible),
            (MipStatus::Unbounded, _) => return Err(Error::MasterUnbounded),
            (_, Some(p)) => (p, r.objective, r.bound),
            (_, None) => {
                return Err(Error::NumericalBreakdown(
                    "master search ended without an incumbent".into(),
                ))
            }
        }
    };
    let sol = MasterSolution {
        x: point[..n1].to_vec(),
        theta: point[n1..].to_vec(),
        objective,
        bound,
    };
    state.x.clone_from(&sol.x);
    state.theta.clone_from(&sol.theta);
    state.lower_bound = bound;
    Ok(sol)
}

/// Default limits for integer-restricted master solves.
pub fn default_master_limits(time: Duration) -> MipLimits {
    MipLimits {
        time,
        nodes: 200_000,
    }
}

#[derive(Clone, Debug, Default)]
pub struct RoundOutcome {
    /// Violated cuts that were new to the pool.
    pub added: usize,
    pub feasibility: usize,
    /// Violated cuts rejected as duplicates.
    pub duplicates: usize,
    pub results: Vec<SubproblemResult>,
}

/// A cut is violated at the master point when its slack is below
/// `−tol·(1 + |θ̂_target|)` (`θ̂_target` is zero for feasibility cuts).
pub fn is_violated(cut: &Cut, x: &[f64], theta: &[f64], tol: f64) -> bool {
    let target: f64 = cut.theta_coeffs.iter().map(|&(s, w)| w * theta[s]).sum();
    cut.slack(x, theta) < -tol * (1.0 + target.abs())
}

/// One pass of per-scenario Benders cuts at the master point.
pub fn scenario_benders_round(
    state: &mut MasterState,
    tol: f64,
    exec: Execution,
) -> Result<RoundOutcome> {
    let results = solve_all_scenarios(state.instance, &state.x, exec)?;
    let mut out = RoundOutcome::default();
    for r in &results {
        let cut = cut_from_result(state.instance, None, r)?;
        add_if_violated(state, cut, tol, &mut out);
    }
    out.results = results;
    Ok(out)
}

/// One pass of partition-based Benders cuts, one per cluster.
pub fn cluster_benders_round(
    state: &mut MasterState,
    aggs: &[AggregatedScenario],
    tol: f64,
    exec: Execution,
) -> Result<RoundOutcome> {
    let x = state.x.clone();
    let results: Vec<SubproblemResult> =
        map_collect(aggs, exec, |a| solve_cluster_subproblem(state.instance, a, &x))
            .into_iter()
            .collect::<Result<_>>()?;
    let mut out = RoundOutcome::default();
    for (a, r) in aggs.iter().zip(&results) {
        let cut = cut_from_result(state.instance, Some(a), r)?;
        add_if_violated(state, cut, tol, &mut out);
    }
    out.results = results;
    Ok(out)
}

fn add_if_violated(state: &mut MasterState, cut: Cut, tol: f64, out: &mut RoundOutcome) {
    if !is_violated(&cut, &state.x, &state.theta, tol) {
        return;
    }
    let feasibility = cut.kind == CutKind::Feasibility;
    if state.add_cut(cut) {
        out.added += 1;
        if feasibility {
            out.feasibility += 1;
        }
    } else {
        out.duplicates += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::builtin;
    use crate::partition::aggregate;

    fn thm1() -> Instance {
        builtin("thm1").unwrap()
    }

    #[test]
    fn thm1_scenario_values() {
        let inst = thm1();
        let r = solve_scenario_subproblem(&inst, 0, &[0.0, 0.0]).unwrap();
        assert!(r.feasible && r.value.abs() < 1e-12);
        let r = solve_scenario_subproblem(&inst, 1, &[0.0, 0.0]).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert_eq!(r.duals, vec![1.0, 0.0]);
    }

    #[test]
    fn satisfied_technology_rows_give_zero() {
        let inst = thm1();
        // x = (1, 0): scenario 1 rows read z ≥ 0 and z ≥ 0.
        let r = solve_scenario_subproblem(&inst, 1, &[1.0, 0.0]).unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn thm1_cluster_values() {
        let inst = thm1();
        let a = aggregate(&inst, &[0, 1]).unwrap();
        let r = solve_cluster_subproblem(&inst, &a, &[0.5, 0.5]).unwrap();
        assert!(r.value.abs() < 1e-12);
        let r = solve_cluster_subproblem(&inst, &a, &[0.0, 0.0]).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn singleton_cluster_matches_scenario() {
        let inst = builtin("refinement-example").unwrap();
        let a = aggregate(&inst, &[2]).unwrap();
        let x = [0.3, 0.7];
        let r1 = solve_cluster_subproblem(&inst, &a, &x).unwrap();
        let r2 = solve_scenario_subproblem(&inst, 2, &x).unwrap();
        assert_eq!(r1, r2);
        let c1 = make_pbbenc(&inst, &a, &r1.duals).unwrap();
        let c2 = make_benders_cut(&inst, 2, &r2.duals).unwrap();
        assert_eq!((c1.x_coeffs, c1.theta_coeffs, c1.rhs), (c2.x_coeffs, c2.theta_coeffs, c2.rhs));
    }

    #[test]
    fn benders_cut_from_dual() {
        let inst = thm1();
        let cut = make_benders_cut(&inst, 1, &[1.0, 0.0]).unwrap();
        // θ_2 ≥ 1 − x − y
        assert_eq!(cut.x_coeffs, vec![1.0, 1.0]);
        assert_eq!(cut.theta_coeffs, vec![(1, 1.0)]);
        assert_eq!(cut.rhs, 1.0);
        let zero = make_benders_cut(&inst, 1, &[0.0, 0.0]).unwrap();
        assert_eq!((zero.x_coeffs, zero.rhs), (vec![0.0, 0.0], 0.0));
    }

    #[test]
    fn cut_is_tight_at_generating_point() {
        let inst = builtin("refinement-example").unwrap();
        let x = [0.4, 0.2];
        for s in 0..inst.num_scenarios() {
            let r = solve_scenario_subproblem(&inst, s, &x).unwrap();
            let cut = make_benders_cut(&inst, s, &r.duals).unwrap();
            let mut theta = vec![0.0; inst.num_scenarios()];
            theta[s] = r.value;
            assert!(cut.slack(&x, &theta).abs() < 1e-9);
        }
    }

    #[test]
    fn thm1_pbbenc_row_one() {
        let inst = thm1();
        let a = aggregate(&inst, &[0, 1]).unwrap();
        let cut = make_pbbenc(&inst, &a, &[1.0, 0.0]).unwrap();
        // θ^P ≥ ½ − y
        assert_eq!(cut.x_coeffs, vec![0.0, 1.0]);
        assert_eq!(cut.theta_coeffs, vec![(0, 0.5), (1, 0.5)]);
        assert_eq!(cut.rhs, 0.5);
    }

    fn pbbenc_pair(inst: &Instance) -> MasterState<'_> {
        let a = aggregate(inst, &[0, 1]).unwrap();
        let mut st = MasterState::new(inst, vec![0.0, 0.0]);
        st.add_cut(make_pbbenc(inst, &a, &[1.0, 0.0]).unwrap());
        st.add_cut(make_pbbenc(inst, &a, &[0.0, 1.0]).unwrap());
        st
    }

    #[test]
    fn master_lp_versus_mip() {
        let inst = thm1();
        let mut st = MasterState::new(&inst, vec![0.0, 0.0]);
        let sol = solve_master(&mut st, true, MipLimits::default()).unwrap();
        assert_eq!(sol.objective, 0.0);

        let mut st = pbbenc_pair(&inst);
        let lp = solve_master(&mut st, true, MipLimits::default()).unwrap();
        assert!(lp.objective.abs() < 1e-9);
        let mip = solve_master(&mut st, false, MipLimits::default()).unwrap();
        assert!((mip.objective - 0.5).abs() < 1e-9);
    }

    #[test]
    fn master_with_aggregated_objective_cut() {
        let inst = thm1();
        let mut st = MasterState::new(&inst, vec![0.0, 0.0]);
        st.add_cut(Cut {
            kind: CutKind::PbLagC,
            x_coeffs: vec![0.0, 0.0],
            theta_coeffs: vec![(0, 0.5), (1, 0.5)],
            rhs: 0.5,
            origin: vec![0, 1],
        });
        let sol = solve_master(&mut st, true, MipLimits::default()).unwrap();
        assert!((sol.objective - 0.5).abs() < 1e-9);
    }

    #[test]
    fn lower_bounds_thm1() {
        let l = recourse_lower_bounds(&thm1(), Execution::Sequential).unwrap();
        assert_eq!(l, vec![0.0, 0.0]);
    }

    #[test]
    fn feasibility_cut_from_ray() {
        // y ≥ 0 with W = [-1]: −y ≥ 1 − x is infeasible unless x ≥ 1.
        let mut inst = thm1();
        inst.recourse = CsrMatrix::from_dense(&[vec![-1.0], vec![0.0]], 1);
        for sc in &mut inst.scenarios {
            sc.technology = CsrMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 0.0]], 2);
            sc.rhs = vec![1.0, 0.0];
        }
        let r = solve_scenario_subproblem(&inst, 0, &[0.0, 0.0]).unwrap();
        assert!(!r.feasible);
        let cut = cut_from_result(&inst, None, &r).unwrap();
        assert_eq!(cut.kind, CutKind::Feasibility);
        // the cut reads (positive multiple of) x ≥ 1
        assert!(cut.slack(&[0.0, 0.0], &[0.0, 0.0]) < 0.0);
        assert!(cut.slack(&[1.0, 0.0], &[0.0, 0.0]) >= -1e-9);
    }
}
