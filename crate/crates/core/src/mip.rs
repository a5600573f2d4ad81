//! Best-first branch-and-bound over the LP core, plus the exhaustive binary
//! enumerator used as an oracle.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::lp::{solve_lp, solve_lp_with_bounds, LpModel, LpStatus};
use crate::parallel::{map_collect, Execution};

pub const INTEGRALITY_TOL: f64 = 1e-6;
pub const RELATIVE_GAP: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct MipModel {
    pub lp: LpModel,
    pub integer: Vec<bool>,
}

impl MipModel {
    pub fn validate(&self) -> Result<()> {
        self.lp.validate()?;
        if self.integer.len() != self.lp.num_vars() {
            return Err(Error::InvalidModel("integrality marks length mismatch".into()));
        }
        for (j, &int) in self.integer.iter().enumerate() {
            if int && !(self.lp.lower[j].is_finite() && self.lp.upper[j].is_finite()) {
                return Err(Error::InvalidModel(format!("integer variable {j} is not bounded")));
            }
        }
        Ok(())
    }

    pub fn integer_vars(&self) -> Vec<usize> {
        (0..self.integer.len()).filter(|&j| self.integer[j]).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MipStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Budget ran out; `objective`/`point` hold the incumbent (if any) and
    /// `bound` the proven lower bound.
    BudgetExceeded,
}

#[derive(Clone, Debug)]
pub struct MipResult {
    pub status: MipStatus,
    pub objective: f64,
    pub point: Option<Vec<f64>>,
    pub bound: f64,
    pub nodes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MipLimits {
    pub time: Duration,
    pub nodes: usize,
}

impl MipLimits {
    pub fn time(time: Duration) -> Self {
        MipLimits {
            time,
            nodes: usize::MAX,
        }
    }
}

impl Default for MipLimits {
    fn default() -> Self {
        MipLimits {
            time: Duration::from_secs(3600),
            nodes: 1_000_000,
        }
    }
}

pub fn solve_mip(model: &MipModel, time_budget: Duration) -> Result<MipResult> {
    solve_mip_with(model, MipLimits::time(time_budget))
}

struct Node {
    bound: f64,
    seq: u64,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap: reverse so the smallest bound, then the oldest
    // node, comes out first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn prune_level(incumbent: f64) -> f64 {
    incumbent - RELATIVE_GAP * (1.0 + incumbent.abs())
}

pub fn solve_mip_with(model: &MipModel, limits: MipLimits) -> Result<MipResult> {
    model.validate()?;
    let start = Instant::now();
    let ints = model.integer_vars();

    if ints.is_empty() {
        let r = solve_lp(&model.lp)?;
        return Ok(match r.status {
            LpStatus::Optimal => MipResult {
                status: MipStatus::Optimal,
                objective: r.objective,
                bound: r.objective,
                point: Some(r.x),
                nodes: 1,
            },
            LpStatus::Infeasible => infeasible(1),
            LpStatus::Unbounded => unbounded(1),
        });
    }

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Node {
        bound: f64::NEG_INFINITY,
        seq,
        lower: model.lp.lower.clone(),
        upper: model.lp.upper.clone(),
    });
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes = 0usize;

    while let Some(node) = heap.pop() {
        let inc_obj = incumbent.as_ref().map_or(f64::INFINITY, |i| i.0);
        if node.bound >= prune_level(inc_obj) {
            // Best-first: every remaining node is at least as bad.
            heap.clear();
            break;
        }
        if nodes >= limits.nodes || start.elapsed() >= limits.time {
            let bound = node.bound.min(inc_obj);
            return Ok(MipResult {
                status: MipStatus::BudgetExceeded,
                objective: inc_obj,
                point: incumbent.map(|i| i.1),
                bound,
                nodes,
            });
        }
        nodes += 1;

        let r = solve_lp_with_bounds(&model.lp, &node.lower, &node.upper)?;
        match r.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => return Ok(unbounded(nodes)),
            LpStatus::Optimal => {}
        }
        if r.objective >= prune_level(inc_obj) {
            continue;
        }

        // Most fractional variable, lowest index on ties.
        let mut branch: Option<(usize, f64)> = None;
        for &j in &ints {
            let v = r.x[j];
            let frac = v - v.floor();
            let dist = frac.min(1.0 - frac);
            if dist <= INTEGRALITY_TOL {
                continue;
            }
            if branch.map_or(true, |(_, best)| dist > best + 1e-12) {
                branch = Some((j, dist));
            }
        }

        match branch {
            None => {
                let mut point = r.x;
                for &j in &ints {
                    point[j] = point[j].round();
                }
                incumbent = Some((r.objective, point));
            }
            Some((j, _)) => {
                let v = r.x[j];
                let mut down_upper = node.upper.clone();
                down_upper[j] = v.floor();
                let mut up_lower = node.lower.clone();
                up_lower[j] = v.ceil();
                seq += 1;
                heap.push(Node {
                    bound: r.objective,
                    seq,
                    lower: node.lower.clone(),
                    upper: down_upper,
                });
                seq += 1;
                heap.push(Node {
                    bound: r.objective,
                    seq,
                    lower: up_lower,
                    upper: node.upper,
                });
            }
        }
    }

    Ok(match incumbent {
        Some((obj, point)) => MipResult {
            status: MipStatus::Optimal,
            objective: obj,
            point: Some(point),
            bound: obj,
            nodes,
        },
        None => infeasible(nodes),
    })
}

fn infeasible(nodes: usize) -> MipResult {
    MipResult {
        status: MipStatus::Infeasible,
        objective: f64::INFINITY,
        point: None,
        bound: f64::INFINITY,
        nodes,
    }
}

fn unbounded(nodes: usize) -> MipResult {
    MipResult {
        status: MipStatus::Unbounded,
        objective: f64::NEG_INFINITY,
        point: None,
        bound: f64::NEG_INFINITY,
        nodes,
    }
}

/// Solves the continuous LP for every 0/1 assignment of the integer
/// variables; returns the feasible ones sorted by objective (ties keep
/// assignment order).
pub fn enumerate_binary(model: &MipModel, cap: u128) -> Result<Vec<(Vec<f64>, f64)>> {
    enumerate_binary_with(model, cap, Execution::default())
}

pub fn enumerate_binary_with(
    model: &MipModel,
    cap: u128,
    exec: Execution,
) -> Result<Vec<(Vec<f64>, f64)>> {
    model.validate()?;
    let ints = model.integer_vars();
    for &j in &ints {
        if model.lp.lower[j] < 0.0 || model.lp.upper[j] > 1.0 {
            return Err(Error::Precondition(format!("integer variable {j} is not binary")));
        }
    }
    let needed = 1u128.checked_shl(ints.len() as u32).unwrap_or(u128::MAX);
    if needed > cap {
        return Err(Error::EnumerationCap { needed, cap });
    }
    let masks: Vec<u64> = (0..needed as u64).collect();
    let solved = map_collect(&masks, exec, |&mask| -> Result<Option<(Vec<f64>, f64)>> {
        let mut lower = model.lp.lower.clone();
        let mut upper = model.lp.upper.clone();
        for (bit, &j) in ints.iter().enumerate() {
            let v = ((mask >> bit) & 1) as f64;
            lower[j] = v;
            upper[j] = v;
        }
        let r = solve_lp_with_bounds(&model.lp, &lower, &upper)?;
        match r.status {
            LpStatus::Optimal => Ok(Some((r.x, r.objective))),
            LpStatus::Infeasible => Ok(None),
            LpStatus::Unbounded => Err(Error::Precondition(
                "continuous completion is unbounded".into(),
            )),
        }
    });
    let mut out = Vec::new();
    for r in solved {
        if let Some(p) = r? {
            out.push(p);
        }
    }
    out.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Sense;

    fn knap() -> MipModel {
        // min -x1 - x2 s.t. x1 + x2 <= 1, binary
        let mut lp = LpModel::new();
        let a = lp.add_var(-1.0, 0.0, 1.0);
        let b = lp.add_var(-1.0, 0.0, 1.0);
        lp.add_constraint(vec![(a, 1.0), (b, 1.0)], Sense::Le, 1.0);
        MipModel {
            lp,
            integer: vec![true, true],
        }
    }

    #[test]
    fn two_optimal_points_deterministic() {
        let m = knap();
        let r1 = solve_mip(&m, Duration::from_secs(10)).unwrap();
        let r2 = solve_mip(&m, Duration::from_secs(10)).unwrap();
        assert_eq!(r1.status, MipStatus::Optimal);
        assert!((r1.objective + 1.0).abs() < 1e-12);
        let p = r1.point.clone().unwrap();
        assert!(p == vec![1.0, 0.0] || p == vec![0.0, 1.0]);
        assert_eq!(r1.point, r2.point);
        assert_eq!(r1.nodes, r2.nodes);
    }

    #[test]
    fn no_integer_marks_is_lp() {
        let mut m = knap();
        m.integer = vec![false, false];
        let r = solve_mip(&m, Duration::from_secs(1)).unwrap();
        let lp = solve_lp(&m.lp).unwrap();
        assert_eq!(r.objective, lp.objective);
        assert_eq!(r.point.unwrap(), lp.x);
    }

    #[test]
    fn infeasible_root() {
        let mut m = knap();
        m.lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Sense::Ge, 3.0);
        let r = solve_mip(&m, Duration::from_secs(1)).unwrap();
        assert_eq!(r.status, MipStatus::Infeasible);
        assert!(enumerate_binary(&m, 16).unwrap().is_empty());
    }

    #[test]
    fn enumeration_lists_feasible_assignments() {
        let e = enumerate_binary(&knap(), 16).unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(e[0].1, -1.0);
        assert_eq!(e[2].1, 0.0);
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(
            enumerate_binary(&knap(), 3),
            Err(Error::EnumerationCap { needed: 4, cap: 3 })
        ));
    }

    #[test]
    fn node_budget_reports_bound() {
        // Needs branching: min -Σ x_i s.t. 2 Σ x_i <= 5 over 4 binaries.
        let mut lp = LpModel::new();
        let xs: Vec<usize> = (0..4).map(|_| lp.add_var(-1.0, 0.0, 1.0)).collect();
        lp.add_constraint(xs.iter().map(|&j| (j, 2.0)).collect(), Sense::Le, 5.0);
        let m = MipModel {
            lp,
            integer: vec![true; 4],
        };
        let r = solve_mip_with(&m, MipLimits { time: Duration::from_secs(5), nodes: 1 }).unwrap();
        assert_eq!(r.status, MipStatus::BudgetExceeded);
        assert!(r.bound <= -2.0 + 1e-9);
        let full = solve_mip(&m, Duration::from_secs(5)).unwrap();
        assert!((full.objective + 2.0).abs() < 1e-9);
        assert!(r.bound <= full.objective + 1e-9);
    }

    #[test]
    fn unbounded_integer_is_rejected() {
        let mut m = knap();
        m.lp.upper[0] = f64::INFINITY;
        assert!(solve_mip(&m, Duration::from_secs(1)).is_err());
    }
}
