//! Problem data for two-stage stochastic programs with fixed continuous
//! recourse:
//!
//! ```text
//! min  c·x + Σ_s p_s d·y_s
//! s.t. A x = b
//!      T_s x + W y_s ≥ h_s     for every scenario s
//!      x ≥ 0 (some entries integer), y_s ≥ 0
//! ```
//!
//! `W` and `d` are shared by all scenarios.

use crate::error::{Error, Result};
use crate::lp::{LpModel, Sense};
use crate::mip::MipModel;
use crate::sparse::CsrMatrix;

pub const PROBABILITY_TOL: f64 = 1e-12;
/// Absolute slack tolerance for cut validity checks.
pub const CUT_VALIDITY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Continuous,
    Binary,
    Integer,
}

impl VarKind {
    pub fn is_integer(self) -> bool {
        !matches!(self, VarKind::Continuous)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub probability: f64,
    pub technology: CsrMatrix,
    pub rhs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub first_stage_cost: Vec<f64>,
    pub first_stage_matrix: CsrMatrix,
    pub first_stage_rhs: Vec<f64>,
    pub integrality: Vec<VarKind>,
    /// Upper bounds on x; binaries are additionally capped at one.
    pub first_stage_upper: Vec<f64>,
    pub second_stage_cost: Vec<f64>,
    pub recourse: CsrMatrix,
    pub scenarios: Vec<Scenario>,
}

impl Instance {
    pub fn n1(&self) -> usize {
        self.first_stage_cost.len()
    }

    pub fn n2(&self) -> usize {
        self.second_stage_cost.len()
    }

    pub fn m1(&self) -> usize {
        self.first_stage_rhs.len()
    }

    pub fn m2(&self) -> usize {
        self.recourse.nrows()
    }

    pub fn num_scenarios(&self) -> usize {
        self.scenarios.len()
    }

    pub fn integer_count(&self) -> usize {
        self.integrality.iter().filter(|k| k.is_integer()).count()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.scenarios.iter().map(|s| s.probability).collect()
    }

    /// Effective box `[0, u_j]` of first-stage variable `j`.
    pub fn x_upper(&self, j: usize) -> f64 {
        match self.integrality[j] {
            VarKind::Binary => self.first_stage_upper[j].min(1.0),
            _ => self.first_stage_upper[j],
        }
    }

    /// Returns every violated invariant; empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let (n1, n2, m1, m2) = (self.n1(), self.n2(), self.m1(), self.m2());

        if self.first_stage_matrix.nrows() != m1 || self.first_stage_matrix.ncols() != n1 {
            out.push(format!(
                "first_stage_matrix is {}x{}, expected {m1}x{n1}",
                self.first_stage_matrix.nrows(),
                self.first_stage_matrix.ncols()
            ));
        }
        if self.integrality.len() != n1 {
            out.push(format!("integrality has {} marks, expected {n1}", self.integrality.len()));
        }
        if self.first_stage_upper.len() != n1 {
            out.push(format!(
                "first_stage_upper has {} entries, expected {n1}",
                self.first_stage_upper.len()
            ));
        } else {
            for (j, &u) in self.first_stage_upper.iter().enumerate() {
                if u.is_nan() || u < 0.0 {
                    out.push(format!("first_stage_upper[{j}] = {u} is not a valid bound"));
                }
                if self.integrality.get(j) == Some(&VarKind::Integer) && !u.is_finite() {
                    out.push(format!("general integer x[{j}] needs a finite upper bound"));
                }
            }
        }
        if self.recourse.ncols() != n2 {
            out.push(format!("recourse has {} columns, expected {n2}", self.recourse.ncols()));
        }
        let finite = |name: &str, v: &[f64], out: &mut Vec<String>| {
            if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                out.push(format!("{name}[{i}] is not finite"));
            }
        };
        finite("first_stage_cost", &self.first_stage_cost, &mut out);
        finite("first_stage_rhs", &self.first_stage_rhs, &mut out);
        finite("second_stage_cost", &self.second_stage_cost, &mut out);

        if self.scenarios.is_empty() {
            out.push("no scenarios".into());
        }
        let mut total = 0.0;
        for (s, sc) in self.scenarios.iter().enumerate() {
            total += sc.probability;
            if !(sc.probability > 0.0 && sc.probability <= 1.0) {
                out.push(format!("scenario {s}: probability {} outside (0, 1]", sc.probability));
            }
            if sc.technology.nrows() != m2 {
                out.push(format!("scenario {s}: T row count mismatch"));
            }
            if sc.technology.ncols() != n1 {
                out.push(format!("scenario {s}: T column count mismatch"));
            }
            if sc.rhs.len() != m2 {
                out.push(format!("scenario {s}: h length mismatch"));
            }
            finite(&format!("scenario {s}: h"), &sc.rhs, &mut out);
        }
        if !self.scenarios.is_empty() && (total - 1.0).abs() > PROBABILITY_TOL {
            out.push(format!("probabilities sum to {total}"));
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(v))
        }
    }

    pub fn check_cluster(&self, cluster: &[usize]) -> Result<()> {
        if cluster.is_empty() {
            return Err(Error::EmptyCluster);
        }
        let count = self.num_scenarios();
        match cluster.iter().find(|&&s| s >= count) {
            Some(&index) => Err(Error::ScenarioOutOfRange { index, count }),
            None => Ok(()),
        }
    }

    /// Weights turning the θ-block into `θ^P = Σ_{s∈P} p_s θ_s / Σ_{s∈P} p_s`.
    pub fn theta_weights(&self, cluster: &[usize]) -> Result<Vec<(usize, f64)>> {
        self.check_cluster(cluster)?;
        let mass: f64 = cluster.iter().map(|&s| self.scenarios[s].probability).sum();
        Ok(cluster
            .iter()
            .map(|&s| (s, self.scenarios[s].probability / mass))
            .collect())
    }

    /// Adds `x` to `lp` with its box and the first-stage equalities; returns
    /// the indices of the new variables.
    pub(crate) fn add_first_stage(&self, lp: &mut LpModel, costs: &[f64]) -> Vec<usize> {
        let xs: Vec<usize> = (0..self.n1())
            .map(|j| lp.add_var(costs[j], 0.0, self.x_upper(j)))
            .collect();
        for i in 0..self.m1() {
            let coeffs = self
                .first_stage_matrix
                .row(i)
                .map(|(j, v)| (xs[j], v))
                .collect();
            lp.add_constraint(coeffs, Sense::Eq, self.first_stage_rhs[i]);
        }
        xs
    }

    /// Adds a recourse block `T x + W y ≥ h` with fresh `y ≥ 0` costed at
    /// `weight · d`; returns the `y` indices.
    pub(crate) fn add_recourse_block(
        &self,
        lp: &mut LpModel,
        xs: &[usize],
        technology: &CsrMatrix,
        rhs: &[f64],
        weight: f64,
    ) -> Vec<usize> {
        let ys: Vec<usize> = self
            .second_stage_cost
            .iter()
            .map(|&d| lp.add_var(weight * d, 0.0, f64::INFINITY))
            .collect();
        for i in 0..self.m2() {
            let mut coeffs: Vec<(usize, f64)> = technology.row(i).map(|(j, v)| (xs[j], v)).collect();
            coeffs.extend(self.recourse.row(i).map(|(k, v)| (ys[k], v)));
            lp.add_constraint(coeffs, Sense::Ge, rhs[i]);
        }
        ys
    }

    pub(crate) fn integer_marks(&self, total_vars: usize) -> Vec<bool> {
        let mut marks = vec![false; total_vars];
        for (j, k) in self.integrality.iter().enumerate() {
            marks[j] = k.is_integer();
        }
        marks
    }

    /// The deterministic equivalent over `(x, y_1, …, y_|S|)`, variables in
    /// that order.
    pub fn build_extensive(&self) -> MipModel {
        let mut lp = LpModel::new();
        let xs = self.add_first_stage(&mut lp, &self.first_stage_cost);
        for sc in &self.scenarios {
            self.add_recourse_block(&mut lp, &xs, &sc.technology, &sc.rhs, sc.probability);
        }
        let integer = self.integer_marks(lp.num_vars());
        MipModel { lp, integer }
    }

    /// Objective of the extensive form at `(x, y_1, …)`.
    pub fn extensive_objective(&self, x: &[f64], ys: &[Vec<f64>]) -> f64 {
        let first: f64 = dot(&self.first_stage_cost, x);
        let second: f64 = self
            .scenarios
            .iter()
            .zip(ys)
            .map(|(sc, y)| sc.probability * dot(&self.second_stage_cost, y))
            .sum();
        first + second
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutKind {
    Benders,
    PbBenC,
    Lagrangian,
    PbLagC,
    /// Farkas feasibility cut; carries no θ-term.
    Feasibility,
}

impl CutKind {
    pub fn name(self) -> &'static str {
        match self {
            CutKind::Benders => "benders",
            CutKind::PbBenC => "pbbenc",
            CutKind::Lagrangian => "lagrangian",
            CutKind::PbLagC => "pblagc",
            CutKind::Feasibility => "feasibility",
        }
    }
}

/// `x_coeffs·x + Σ_s theta_coeffs_s θ_s ≥ rhs`
#[derive(Clone, Debug, PartialEq)]
pub struct Cut {
    pub kind: CutKind,
    pub x_coeffs: Vec<f64>,
    pub theta_coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
    /// Scenarios the cut was generated from.
    pub origin: Vec<usize>,
}

impl Cut {
    pub fn lhs(&self, x: &[f64], theta: &[f64]) -> f64 {
        dot(&self.x_coeffs, x) + self.theta_coeffs.iter().map(|&(s, c)| c * theta[s]).sum::<f64>()
    }

    /// Positive when satisfied with room to spare.
    pub fn slack(&self, x: &[f64], theta: &[f64]) -> f64 {
        self.lhs(x, theta) - self.rhs
    }

    fn max_abs(&self) -> f64 {
        self.x_coeffs
            .iter()
            .copied()
            .chain(self.theta_coeffs.iter().map(|c| c.1))
            .chain(std::iter::once(self.rhs))
            .fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// Coefficientwise comparison after scaling both cuts by their largest
    /// absolute coefficient.
    pub fn same_as(&self, other: &Cut, tol: f64) -> bool {
        if self.x_coeffs.len() != other.x_coeffs.len() {
            return false;
        }
        let (sa, sb) = (self.max_abs().max(1e-300), other.max_abs().max(1e-300));
        let close = |a: f64, b: f64| (a / sa - b / sb).abs() <= tol;
        if !close(self.rhs, other.rhs) {
            return false;
        }
        if !self.x_coeffs.iter().zip(&other.x_coeffs).all(|(&a, &b)| close(a, b)) {
            return false;
        }
        let mut ta: Vec<(usize, f64)> = self.theta_coeffs.clone();
        let mut tb: Vec<(usize, f64)> = other.theta_coeffs.clone();
        ta.retain(|c| c.1 != 0.0);
        tb.retain(|c| c.1 != 0.0);
        ta.sort_by_key(|c| c.0);
        tb.sort_by_key(|c| c.0);
        let mut i = 0;
        let mut k = 0;
        while i < ta.len() || k < tb.len() {
            match (ta.get(i), tb.get(k)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    if !close(a.1, b.1) {
                        return false;
                    }
                    i += 1;
                    k += 1;
                }
                (Some(a), b) if b.map_or(true, |b| a.0 < b.0) => {
                    if !close(a.1, 0.0) {
                        return false;
                    }
                    i += 1;
                }
                (_, Some(b)) => {
                    if !close(0.0, b.1) {
                        return false;
                    }
                    k += 1;
                }
                _ => unreachable!(),
            }
        }
        true
    }
}

/// Master problem state over `(x, θ_1, …, θ_|S|)`.
#[derive(Clone, Debug)]
pub struct MasterState<'a> {
    pub instance: &'a Instance,
    pub cuts: Vec<Cut>,
    pub theta_lower: Vec<f64>,
    pub lower_bound: f64,
    pub x: Vec<f64>,
    pub theta: Vec<f64>,
}

/// Tolerance of the duplicate-cut filter.
pub const DEDUP_TOL: f64 = 1e-9;

impl<'a> MasterState<'a> {
    pub fn new(instance: &'a Instance, theta_lower: Vec<f64>) -> Self {
        MasterState {
            instance,
            cuts: Vec::new(),
            theta: theta_lower.clone(),
            theta_lower,
            lower_bound: f64::NEG_INFINITY,
            x: vec![0.0; instance.n1()],
        }
    }

    /// Appends `cut` unless an equivalent cut is already in the pool.
    pub fn add_cut(&mut self, cut: Cut) -> bool {
        if self.cuts.iter().any(|c| c.same_as(&cut, DEDUP_TOL)) {
            return false;
        }
        self.cuts.push(cut);
        true
    }

    /// `θ^P` at the current master point.
    pub fn cluster_theta(&self, weights: &[(usize, f64)]) -> f64 {
        weights.iter().map(|&(s, w)| w * self.theta[s]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::builtin;

    fn two_scenario() -> Instance {
        builtin("thm1").unwrap()
    }

    #[test]
    fn builtin_is_valid() {
        assert!(two_scenario().validate().is_empty());
    }

    #[test]
    fn probability_sum_is_reported() {
        let mut inst = two_scenario();
        inst.scenarios[0].probability = 0.6;
        inst.scenarios[1].probability = 0.6;
        let v = inst.validate();
        assert_eq!(v, vec!["probabilities sum to 1.2".to_string()]);
    }

    #[test]
    fn technology_rows_are_checked() {
        let mut inst = two_scenario();
        inst.scenarios[0].technology = CsrMatrix::zeros(inst.m2() + 1, inst.n1());
        assert_eq!(inst.validate(), vec!["scenario 0: T row count mismatch".to_string()]);
    }

    #[test]
    fn theta_weights_cases() {
        let mut inst = two_scenario();
        assert_eq!(inst.theta_weights(&[0, 1]).unwrap(), vec![(0, 0.5), (1, 0.5)]);
        assert_eq!(inst.theta_weights(&[1]).unwrap(), vec![(1, 1.0)]);
        inst.scenarios[0].probability = 0.2;
        inst.scenarios[1].probability = 0.6;
        let w = inst.theta_weights(&[0, 1]).unwrap();
        assert!((w[0].1 - 0.25).abs() < 1e-15 && (w[1].1 - 0.75).abs() < 1e-15);
        assert!(matches!(inst.theta_weights(&[]), Err(Error::EmptyCluster)));
    }

    #[test]
    fn extensive_dimensions() {
        let inst = two_scenario();
        let mip = inst.build_extensive();
        assert_eq!(mip.lp.num_vars(), 2 + 2);
        assert_eq!(mip.lp.num_rows(), 4);
        assert_eq!(mip.integer.iter().filter(|&&b| b).count(), 2);

        let three = crate::instances::random_instance(3, 2, 2, 2, 3, 11);
        let mip = three.build_extensive();
        assert_eq!(mip.lp.num_vars(), 2 + 6);
        assert_eq!(mip.lp.num_rows(), three.m1() + 6);
    }

    #[test]
    fn single_scenario_extensive_is_deterministic_problem() {
        let mut inst = two_scenario();
        inst.scenarios.truncate(1);
        inst.scenarios[0].probability = 1.0;
        let mip = inst.build_extensive();
        assert_eq!(mip.lp.objective, vec![0.0, 0.0, 1.0]);
        assert_eq!(mip.lp.num_rows(), 2);
    }

    #[test]
    fn dedup_uses_scaled_coefficients() {
        let a = Cut {
            kind: CutKind::Benders,
            x_coeffs: vec![1.0, 2.0],
            theta_coeffs: vec![(0, 1.0)],
            rhs: 3.0,
            origin: vec![0],
        };
        let mut b = a.clone();
        for v in &mut b.x_coeffs {
            *v *= 2.0;
        }
        b.theta_coeffs[0].1 = 2.0;
        b.rhs = 6.0;
        assert!(a.same_as(&b, 1e-9));
        b.rhs = 6.1;
        assert!(!a.same_as(&b, 1e-9));
    }
}
