//! Lagrangian cuts `π·x + π₀θ ≥ Q*(π, π₀)` for a scenario or an aggregated
//! cluster, where
//!
//! ```text
//! Q*(π, π₀) = min { π·x + π₀ d·y : A x = b, x integral where marked,
//!                   T x + W y ≥ h, x in its box, y ≥ 0 }
//! ```
//!
//! Multipliers are separated with a cutting-plane method over a box of
//! multipliers: the outer LP maximizes an upper model of
//! `L(π, π₀) = Q*(π, π₀) − π·x̂ − π₀θ̂` built from the inner solutions seen
//! so far, and each outer solution is evaluated exactly by a MIP.

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpModel, LpStatus, Sense};
use crate::mip::{solve_mip_with, MipLimits, MipModel, MipStatus};
use crate::model::{dot, Cut, CutKind, Instance};
use crate::partition::{aggregate, AggregatedScenario};

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierPoint {
    pub pi: Vec<f64>,
    pub pi0: f64,
}

impl MultiplierPoint {
    /// `(π, π₀) = (0, 1)`: the pure recourse objective.
    pub fn recourse(n1: usize) -> Self {
        MultiplierPoint {
            pi: vec![0.0; n1],
            pi0: 1.0,
        }
    }
}

/// Multiplier box `‖π‖∞ ≤ pi_bound`, `0 ≤ π₀ ≤ pi0_bound`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normalization {
    pub pi_bound: f64,
    pub pi0_bound: f64,
}

impl Default for Normalization {
    fn default() -> Self {
        Normalization {
            pi_bound: 1.0,
            pi0_bound: 1.0,
        }
    }
}

/// A scenario or a cluster with its (aggregated) data.
#[derive(Clone, Debug)]
pub struct Target {
    pub data: AggregatedScenario,
    pub kind: CutKind,
}

impl Target {
    pub fn scenario(instance: &Instance, s: usize) -> Result<Self> {
        Ok(Target {
            data: aggregate(instance, &[s])?,
            kind: CutKind::Lagrangian,
        })
    }

    pub fn cluster(data: AggregatedScenario) -> Self {
        Target {
            data,
            kind: CutKind::PbLagC,
        }
    }

    pub fn cluster_of(instance: &Instance, cluster: &[usize]) -> Result<Self> {
        Ok(Self::cluster(aggregate(instance, cluster)?))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InnerSolution {
    /// Best objective found.
    pub objective: f64,
    /// Proven lower bound on `Q*`; the value used as a cut right-hand side.
    pub bound: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `d·y`
    pub recourse_cost: f64,
    pub proven: bool,
}

/// The inner MIP of one target; only its objective changes between calls.
#[derive(Clone, Debug)]
pub struct InnerModel {
    mip: MipModel,
    n1: usize,
    d: Vec<f64>,
    cluster: Vec<usize>,
    limits: MipLimits,
}

impl InnerModel {
    pub fn new(instance: &Instance, target: &Target, limits: MipLimits) -> Result<Self> {
        if let Some(j) = (0..instance.n1()).find(|&j| !instance.x_upper(j).is_finite()) {
            return Err(Error::Precondition(format!(
                "Lagrangian separation needs bounded first-stage variables (x[{j}] is unbounded)"
            )));
        }
        let mut lp = LpModel::new();
        let xs = instance.add_first_stage(&mut lp, &vec![0.0; instance.n1()]);
        instance.add_recourse_block(&mut lp, &xs, &target.data.technology, &target.data.rhs, 1.0);
        let integer = instance.integer_marks(lp.num_vars());
        Ok(InnerModel {
            mip: MipModel { lp, integer },
            n1: instance.n1(),
            d: instance.second_stage_cost.clone(),
            cluster: target.data.cluster.clone(),
            limits,
        })
    }

    pub fn evaluate(&self, mult: &MultiplierPoint) -> Result<InnerSolution> {
        let mut mip = self.mip.clone();
        for (j, c) in mip.lp.objective.iter_mut().enumerate() {
            *c = if j < self.n1 {
                mult.pi[j]
            } else {
                mult.pi0 * self.d[j - self.n1]
            };
        }
        let r = solve_mip_with(&mip, self.limits)?;
        let point = match (r.status, r.point) {
            (MipStatus::Infeasible, _) => return Err(Error::InnerInfeasible(self.cluster.clone())),
            (MipStatus::Unbounded, _) => {
                return Err(Error::Precondition(format!(
                    "inner problem of cluster {:?} is unbounded",
                    self.cluster
                )))
            }
            (_, Some(p)) => p,
            (_, None) => {
                return Err(Error::NumericalBreakdown(format!(
                    "inner problem of cluster {:?}: no incumbent within budget",
                    self.cluster
                )))
            }
        };
        let x = point[..self.n1].to_vec();
        let y = point[self.n1..].to_vec();
        Ok(InnerSolution {
            objective: r.objective,
            bound: r.bound.min(r.objective),
            recourse_cost: dot(&self.d, &y),
            x,
            y,
            proven: r.status == MipStatus::Optimal,
        })
    }
}

/// `Q*(π, π₀)` and a minimizer.
pub fn evaluate_inner(
    instance: &Instance,
    target: &Target,
    mult: &MultiplierPoint,
    limits: MipLimits,
) -> Result<InnerSolution> {
    InnerModel::new(instance, target, limits)?.evaluate(mult)
}

/// Inner solutions collected during one separation.
#[derive(Clone, Debug, Default)]
pub struct EvaluationPool {
    pub points: Vec<InnerSolution>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeparationStatus {
    ViolatedCutFound,
    NoViolatedCut,
    BudgetExceeded,
}

#[derive(Clone, Debug)]
pub struct SeparationOutcome {
    pub status: SeparationStatus,
    pub multiplier: MultiplierPoint,
    /// Certified `L` at `multiplier`.
    pub violation: f64,
    /// Right-hand side `Q*` used for the cut.
    pub inner_value: f64,
    pub cut: Option<Cut>,
    pub inner_calls: usize,
    /// Outer LP values, one per outer iteration.
    pub outer_values: Vec<f64>,
    pub pool: EvaluationPool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparationConfig {
    /// Maximum inner MIP calls per separation.
    pub budget: usize,
    /// Relative tolerance of the outer/inner gap.
    pub gap_tol: f64,
    /// A cut is reported when `L > violation_tol·(1 + |θ̂|)`.
    pub violation_tol: f64,
    pub normalization: Normalization,
    pub inner_limits: MipLimits,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        SeparationConfig {
            budget: 50,
            gap_tol: 1e-6,
            violation_tol: 1e-6,
            normalization: Normalization::default(),
            inner_limits: MipLimits {
                time: std::time::Duration::from_secs(600),
                nodes: 100_000,
            },
        }
    }
}

/// Looks for the most violated Lagrangian cut for `target` at `(x̂, θ̂)`,
/// where `theta_hat` is the target's (weighted) recourse estimate.
pub fn separate(
    instance: &Instance,
    target: &Target,
    x_hat: &[f64],
    theta_hat: f64,
    config: &SeparationConfig,
) -> Result<SeparationOutcome> {
    if config.budget == 0 {
        return Err(Error::InvalidConfig("separation budget must be at least 1".into()));
    }
    let n1 = instance.n1();
    let inner = InnerModel::new(instance, target, config.inner_limits)?;
    let norm = config.normalization;

    let violation_at = |m: &MultiplierPoint, sol: &InnerSolution| {
        sol.bound - dot(&m.pi, x_hat) - m.pi0 * theta_hat
    };

    let mut mult = MultiplierPoint::recourse(n1);
    mult.pi0 = norm.pi0_bound;
    let first = inner.evaluate(&mult)?;
    let mut best = (violation_at(&mult, &first), mult.clone(), first.bound);
    let mut pool = EvaluationPool {
        points: vec![first],
    };
    let mut outer_values = Vec::new();
    let mut converged = false;

    // Outer LP over (π, π₀, η): max η s.t. η ≤ π·(x_j − x̂) + π₀(d·y_j − θ̂).
    let mut outer = LpModel::new();
    for _ in 0..n1 {
        outer.add_var(0.0, -norm.pi_bound, norm.pi_bound);
    }
    let pi0 = outer.add_var(0.0, 0.0, norm.pi0_bound);
    let eta = outer.add_var(-1.0, f64::NEG_INFINITY, f64::INFINITY);

    while pool.points.len() < config.budget {
        let last = pool.points.last().expect("pool is seeded");
        let mut coeffs: Vec<(usize, f64)> = (0..n1)
            .map(|j| (j, -(last.x[j] - x_hat[j])))
            .filter(|c| c.1 != 0.0)
            .collect();
        coeffs.push((pi0, -(last.recourse_cost - theta_hat)));
        coeffs.push((eta, 1.0));
        outer.add_constraint(coeffs, Sense::Le, 0.0);

        let r = solve_lp(&outer)?;
        if r.status != LpStatus::Optimal {
            return Err(Error::NumericalBreakdown(format!(
                "separation outer problem ended {:?}",
                r.status
            )));
        }
        let upper = -r.objective;
        outer_values.push(upper);
        if upper - best.0 <= config.gap_tol * (1.0 + best.2.abs()) {
            converged = true;
            break;
        }
        let m = MultiplierPoint {
            pi: r.x[..n1].to_vec(),
            pi0: r.x[pi0],
        };
        let sol = inner.evaluate(&m)?;
        let l = violation_at(&m, &sol);
        if l > best.0 {
            best = (l, m, sol.bound);
        }
        pool.points.push(sol);
    }

    let (violation, multiplier, inner_value) = best;
    let violated = violation > config.violation_tol * (1.0 + theta_hat.abs());
    let status = if violated {
        SeparationStatus::ViolatedCutFound
    } else if converged {
        SeparationStatus::NoViolatedCut
    } else {
        SeparationStatus::BudgetExceeded
    };
    let cut = if violated {
        Some(make_lagrangian_cut(instance, target, &multiplier, inner_value)?)
    } else {
        None
    };
    Ok(SeparationOutcome {
        status,
        multiplier,
        violation,
        inner_value,
        cut,
        inner_calls: pool.points.len(),
        outer_values,
        pool,
    })
}

/// `π·x + π₀ θ^target ≥ value`
pub fn make_lagrangian_cut(
    instance: &Instance,
    target: &Target,
    mult: &MultiplierPoint,
    value: f64,
) -> Result<Cut> {
    let weights = instance.theta_weights(&target.data.cluster)?;
    Ok(Cut {
        kind: target.kind,
        x_coeffs: mult.pi.clone(),
        theta_coeffs: if mult.pi0 == 0.0 {
            Vec::new()
        } else {
            weights.into_iter().map(|(s, w)| (s, mult.pi0 * w)).collect()
        },
        rhs: value,
        origin: target.data.cluster.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::builtin;

    fn limits() -> MipLimits {
        MipLimits::default()
    }

    #[test]
    fn zero_multiplier_gives_zero() {
        let inst = builtin("thm1").unwrap();
        let t = Target::cluster_of(&inst, &[0, 1]).unwrap();
        let m = MultiplierPoint {
            pi: vec![0.0, 0.0],
            pi0: 0.0,
        };
        assert_eq!(evaluate_inner(&inst, &t, &m, limits()).unwrap().objective, 0.0);
    }

    #[test]
    fn thm1_inner_values() {
        let inst = builtin("thm1").unwrap();
        let m = MultiplierPoint::recourse(2);
        let cluster = Target::cluster_of(&inst, &[0, 1]).unwrap();
        let v = evaluate_inner(&inst, &cluster, &m, limits()).unwrap();
        assert!((v.objective - 0.5).abs() < 1e-9);
        let s0 = Target::scenario(&inst, 0).unwrap();
        let v = evaluate_inner(&inst, &s0, &m, limits()).unwrap();
        assert!(v.objective.abs() < 1e-9);
        assert_eq!(v.x[0], v.x[1]);
    }

    #[test]
    fn thm1_cluster_separation_finds_half() {
        let inst = builtin("thm1").unwrap();
        let t = Target::cluster_of(&inst, &[0, 1]).unwrap();
        let out = separate(&inst, &t, &[0.5, 0.5], 0.0, &SeparationConfig::default()).unwrap();
        assert_eq!(out.status, SeparationStatus::ViolatedCutFound);
        assert!((out.violation - 0.5).abs() < 1e-6);
        let cut = out.cut.unwrap();
        assert_eq!(cut.kind, CutKind::PbLagC);
        // At least as strong as θ^P ≥ ½ at x̂.
        assert!(cut.slack(&[0.5, 0.5], &[0.0, 0.0]) <= -0.5 + 1e-6);
    }

    #[test]
    fn thm1_scenario_point_in_hull() {
        let inst = builtin("thm1").unwrap();
        let t = Target::scenario(&inst, 0).unwrap();
        let out = separate(&inst, &t, &[0.5, 0.5], 0.0, &SeparationConfig::default()).unwrap();
        assert_eq!(out.status, SeparationStatus::NoViolatedCut);
        assert!(out.cut.is_none());
    }

    #[test]
    fn integer_point_with_true_recourse_is_not_cut() {
        let inst = builtin("refinement-example").unwrap();
        let x = [1.0, 0.0];
        for s in 0..inst.num_scenarios() {
            let f = crate::benders::solve_scenario_subproblem(&inst, s, &x).unwrap().value;
            let t = Target::scenario(&inst, s).unwrap();
            let out = separate(&inst, &t, &x, f, &SeparationConfig::default()).unwrap();
            assert_eq!(out.status, SeparationStatus::NoViolatedCut, "scenario {s}");
        }
    }

    #[test]
    fn outer_values_do_not_increase() {
        let inst = builtin("refinement-example").unwrap();
        let t = Target::cluster_of(&inst, &[0, 1, 2, 3]).unwrap();
        let out = separate(&inst, &t, &[0.5, 0.5], 0.0, &SeparationConfig::default()).unwrap();
        for w in out.outer_values.windows(2) {
            assert!(w[1] <= w[0] + 1e-9);
        }
    }

    #[test]
    fn cut_construction() {
        let inst = builtin("thm1").unwrap();
        let t = Target::cluster_of(&inst, &[0, 1]).unwrap();
        let cut = make_lagrangian_cut(&inst, &t, &MultiplierPoint::recourse(2), 0.5).unwrap();
        assert_eq!(cut.theta_coeffs, vec![(0, 0.5), (1, 0.5)]);
        assert_eq!(cut.rhs, 0.5);

        let m = MultiplierPoint {
            pi: vec![1.0, -1.0],
            pi0: 0.0,
        };
        let cut = make_lagrangian_cut(&inst, &t, &m, -1.0).unwrap();
        assert!(cut.theta_coeffs.is_empty());

        let single = Target::cluster_of(&inst, &[1]).unwrap();
        let scen = Target::scenario(&inst, 1).unwrap();
        let a = make_lagrangian_cut(&inst, &single, &MultiplierPoint::recourse(2), 1.0).unwrap();
        let b = make_lagrangian_cut(&inst, &scen, &MultiplierPoint::recourse(2), 1.0).unwrap();
        assert_eq!((a.x_coeffs, a.theta_coeffs, a.rhs), (b.x_coeffs, b.theta_coeffs, b.rhs));
    }
}
