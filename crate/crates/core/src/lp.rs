//! Dense revised simplex for bounded linear programs.
//!
//! Every row `a·x (≤|≥|=) b` is written as `a·x − r = 0` with a logical
//! variable `r` carrying the row bounds, so the starting basis is `−I` and
//! the solver only ever deals with box-bounded variables. Phase one minimises
//! the sum of bound violations of the basic variables; its dual vector is the
//! Farkas certificate when the model is infeasible.
//!
//! Sign convention for row duals `y` (minimisation): `y ≥ 0` on `≥` rows,
//! `y ≤ 0` on `≤` rows, free on `=` rows. Reduced costs are `c − Aᵀy`.

use crate::error::{Error, Result};

pub const FEASIBILITY_TOL: f64 = 1e-7;
pub const OPTIMALITY_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;
const STALL_LIMIT: usize = 1000;
const REFACTOR_EVERY: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LpModel {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> usize {
        self.constraints.push(Constraint { coeffs, sense, rhs });
        self.constraints.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::InvalidModel(format!(
                "bound vectors have lengths {}/{}, expected {n}",
                self.lower.len(),
                self.upper.len()
            )));
        }
        for j in 0..n {
            if !self.objective[j].is_finite() {
                return Err(Error::InvalidModel(format!("objective entry {j} is not finite")));
            }
            if self.lower[j].is_nan() || self.upper[j].is_nan() || self.lower[j] > self.upper[j] {
                return Err(Error::InvalidModel(format!(
                    "variable {j} has bounds [{}, {}]",
                    self.lower[j], self.upper[j]
                )));
            }
            if self.lower[j] == f64::INFINITY || self.upper[j] == f64::NEG_INFINITY {
                return Err(Error::InvalidModel(format!("variable {j} has an empty domain")));
            }
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(Error::InvalidModel(format!("row {i} has non-finite rhs")));
            }
            for &(j, v) in &row.coeffs {
                if j >= n || !v.is_finite() {
                    return Err(Error::InvalidModel(format!("row {i} has a bad entry ({j}, {v})")));
                }
            }
        }
        Ok(())
    }

    /// Row activity box implied by the sense.
    pub fn row_bounds(&self, i: usize) -> (f64, f64) {
        let row = &self.constraints[i];
        match row.sense {
            Sense::Le => (f64::NEG_INFINITY, row.rhs),
            Sense::Ge => (row.rhs, f64::INFINITY),
            Sense::Eq => (row.rhs, row.rhs),
        }
    }

    pub fn row_activity(&self, i: usize, x: &[f64]) -> f64 {
        self.constraints[i].coeffs.iter().map(|&(j, v)| v * x[j]).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpResult {
    pub status: LpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
    /// Row duals; meaningful when `Optimal`.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    /// Row multipliers `y` with `max_{x∈box} (Aᵀy)·x < min_{r∈row box} y·r`.
    pub farkas: Option<Vec<f64>>,
    pub iterations: usize,
}

pub fn solve_lp(model: &LpModel) -> Result<LpResult> {
    model.validate()?;
    Simplex::new(model, &model.lower, &model.upper).run()
}

/// Solves `model` with its variable bounds replaced; used by branch-and-bound.
pub fn solve_lp_with_bounds(model: &LpModel, lower: &[f64], upper: &[f64]) -> Result<LpResult> {
    let n = model.num_vars();
    if lower.len() != n || upper.len() != n {
        return Err(Error::InvalidModel("bound override has wrong length".into()));
    }
    if (0..n).any(|j| lower[j] > upper[j]) {
        // Empty box: a single violated bound is its own certificate.
        return Ok(LpResult {
            status: LpStatus::Infeasible,
            objective: f64::INFINITY,
            x: vec![0.0; n],
            duals: vec![0.0; model.num_rows()],
            reduced_costs: vec![0.0; n],
            farkas: None,
            iterations: 0,
        });
    }
    Simplex::new(model, lower, upper).run()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable parked at zero.
    Zero,
}

struct Simplex<'a> {
    m: usize,
    n: usize,
    model: &'a LpModel,
    cols: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    value: Vec<f64>,
    state: Vec<VarState>,
    head: Vec<usize>,
    binv: Vec<f64>,
    pivots_since_refactor: usize,
    iterations: usize,
}

enum Step {
    Continue,
    Optimal,
    Infeasible(Vec<f64>),
    Unbounded,
}

impl<'a> Simplex<'a> {
    fn new(model: &'a LpModel, lower: &[f64], upper: &[f64]) -> Self {
        let n = model.num_vars();
        let m = model.num_rows();
        let mut cols = vec![Vec::new(); n];
        for (i, row) in model.constraints.iter().enumerate() {
            for &(j, v) in &row.coeffs {
                if v != 0.0 {
                    cols[j].push((i, v));
                }
            }
        }
        // Merge duplicate (row, col) entries.
        for col in &mut cols {
            col.sort_by_key(|e| e.0);
            col.dedup_by(|b, a| {
                if a.0 == b.0 {
                    a.1 += b.1;
                    true
                } else {
                    false
                }
            });
        }

        let mut lo = lower.to_vec();
        let mut up = upper.to_vec();
        for i in 0..m {
            let (l, u) = model.row_bounds(i);
            lo.push(l);
            up.push(u);
        }

        let mut value = vec![0.0; n + m];
        let mut state = vec![VarState::Basic; n + m];
        for j in 0..n {
            let (s, v) = if lo[j].is_finite() {
                (VarState::AtLower, lo[j])
            } else if up[j].is_finite() {
                (VarState::AtUpper, up[j])
            } else {
                (VarState::Zero, 0.0)
            };
            state[j] = s;
            value[j] = v;
        }
        for (j, col) in cols.iter().enumerate() {
            if value[j] != 0.0 {
                for &(i, v) in col {
                    value[n + i] += v * value[j];
                }
            }
        }

        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = -1.0;
        }

        Simplex {
            m,
            n,
            model,
            cols,
            lower: lo,
            upper: up,
            value,
            state,
            head: (n..n + m).collect(),
            binv,
            pivots_since_refactor: 0,
            iterations: 0,
        }
    }

    fn run(mut self) -> Result<LpResult> {
        let limit = 20_000 + 50 * (self.n + self.m);
        let mut stalled = 0usize;
        let mut bland = false;
        let mut refactored_at_end = false;

        loop {
            if self.iterations > limit {
                return Err(Error::NumericalBreakdown(format!(
                    "simplex iteration limit {limit} reached ({} rows, {} columns)",
                    self.m, self.n
                )));
            }
            match self.iterate(bland, &mut stalled)? {
                Step::Continue => {
                    if stalled >= STALL_LIMIT {
                        bland = true;
                    } else if stalled == 0 {
                        bland = false;
                    }
                }
                Step::Optimal => {
                    // Re-derive basic values from a fresh inverse before trusting them.
                    if !refactored_at_end {
                        refactored_at_end = true;
                        self.refactor()?;
                        if self.max_basic_violation() > FEASIBILITY_TOL {
                            continue;
                        }
                    }
                    return Ok(self.finish_optimal());
                }
                Step::Infeasible(y) => {
                    if !refactored_at_end {
                        refactored_at_end = true;
                        self.refactor()?;
                        continue;
                    }
                    return Ok(self.finish(LpStatus::Infeasible, Some(y)));
                }
                Step::Unbounded => return Ok(self.finish(LpStatus::Unbounded, None)),
            }
        }
    }

    fn cost(&self, j: usize) -> f64 {
        if j < self.n {
            self.model.objective[j]
        } else {
            0.0
        }
    }

    fn violation(&self, j: usize) -> f64 {
        let v = self.value[j];
        if v < self.lower[j] {
            self.lower[j] - v
        } else if v > self.upper[j] {
            v - self.upper[j]
        } else {
            0.0
        }
    }

    fn max_basic_violation(&self) -> f64 {
        self.head
            .iter()
            .map(|&j| self.violation(j) / (1.0 + self.value[j].abs().min(1e6)))
            .fold(0.0, f64::max)
    }

    /// `y = c_Bᵀ B⁻¹` for the given basic cost vector.
    fn btran(&self, cb: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &c) in cb.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let row = &self.binv[i * m..(i + 1) * m];
            for k in 0..m {
                y[k] += c * row[k];
            }
        }
        y
    }

    /// `B⁻¹ a_j`
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        if j < self.n {
            for &(k, v) in &self.cols[j] {
                for i in 0..m {
                    alpha[i] += self.binv[i * m + k] * v;
                }
            }
        } else {
            let k = j - self.n;
            for i in 0..m {
                alpha[i] = -self.binv[i * m + k];
            }
        }
        alpha
    }

    fn reduced_cost(&self, j: usize, c: f64, y: &[f64]) -> f64 {
        if j < self.n {
            c - self.cols[j].iter().map(|&(k, v)| y[k] * v).sum::<f64>()
        } else {
            c + y[j - self.n]
        }
    }

    fn iterate(&mut self, bland: bool, stalled: &mut usize) -> Result<Step> {
        self.iterations += 1;
        let m = self.m;

        // Phase selection from the current basic values.
        let mut phase_one = false;
        let mut cb = vec![0.0; m];
        for (i, &j) in self.head.iter().enumerate() {
            let v = self.value[j];
            if v < self.lower[j] - FEASIBILITY_TOL {
                cb[i] = -1.0;
                phase_one = true;
            } else if v > self.upper[j] + FEASIBILITY_TOL {
                cb[i] = 1.0;
                phase_one = true;
            }
        }
        if !phase_one {
            for (i, &j) in self.head.iter().enumerate() {
                cb[i] = self.cost(j);
            }
        }
        let y = self.btran(&cb);

        // Pricing.
        let mut entering: Option<(usize, f64)> = None;
        for j in 0..self.n + m {
            let st = self.state[j];
            if st == VarState::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let c = if phase_one { 0.0 } else { self.cost(j) };
            let d = self.reduced_cost(j, c, &y);
            let eligible = match st {
                VarState::AtLower => d < -OPTIMALITY_TOL,
                VarState::AtUpper => d > OPTIMALITY_TOL,
                VarState::Zero => d.abs() > OPTIMALITY_TOL,
                VarState::Basic => false,
            };
            if !eligible {
                continue;
            }
            if bland {
                entering = Some((j, d));
                break;
            }
            if entering.map_or(true, |(_, best)| d.abs() > best.abs()) {
                entering = Some((j, d));
            }
        }

        let Some((q, dq)) = entering else {
            return Ok(if phase_one {
                Step::Infeasible(y)
            } else {
                Step::Optimal
            });
        };

        let dir = if dq < 0.0 { 1.0 } else { -1.0 };
        let alpha = self.ftran(q);

        // Ratio test.
        let mut best_t = f64::INFINITY;
        let mut leave: Option<(usize, f64, bool)> = None; // (row, |rate|, to_upper)
        for i in 0..m {
            let rate = -dir * alpha[i];
            if rate.abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.head[i];
            let v = self.value[j];
            let (target, to_upper) = if rate < 0.0 {
                if v > self.upper[j] + FEASIBILITY_TOL {
                    (self.upper[j], true)
                } else if v < self.lower[j] - FEASIBILITY_TOL || self.lower[j] == f64::NEG_INFINITY {
                    continue;
                } else {
                    (self.lower[j], false)
                }
            } else if v < self.lower[j] - FEASIBILITY_TOL {
                (self.lower[j], false)
            } else if v > self.upper[j] + FEASIBILITY_TOL || self.upper[j] == f64::INFINITY {
                continue;
            } else {
                (self.upper[j], true)
            };
            let t = ((target - v) / rate).max(0.0);
            let better = if t < best_t - DEGENERATE_STEP {
                true
            } else if t <= best_t + DEGENERATE_STEP {
                let (bi, brate, _) = leave.expect("tie implies an earlier candidate");
                if bland {
                    self.head[i] < self.head[bi]
                } else {
                    rate.abs() > brate
                }
            } else {
                false
            };
            if better {
                best_t = best_t.min(t);
                leave = Some((i, rate.abs(), to_upper));
            }
        }

        let flip = self.upper[q] - self.lower[q];
        if flip.is_finite() && flip <= best_t {
            // Bound flip: the entering variable reaches its own opposite bound.
            let t = flip;
            for i in 0..m {
                let j = self.head[i];
                self.value[j] -= dir * alpha[i] * t;
            }
            if dir > 0.0 {
                self.value[q] = self.upper[q];
                self.state[q] = VarState::AtUpper;
            } else {
                self.value[q] = self.lower[q];
                self.state[q] = VarState::AtLower;
            }
            *stalled = if t <= DEGENERATE_STEP { *stalled + 1 } else { 0 };
            return Ok(Step::Continue);
        }

        let Some((r, _, to_upper)) = leave else {
            if phase_one {
                return Err(Error::NumericalBreakdown(
                    "phase one found an unblocked improving ray".into(),
                ));
            }
            return Ok(Step::Unbounded);
        };

        let t = best_t;
        for i in 0..m {
            let j = self.head[i];
            self.value[j] -= dir * alpha[i] * t;
        }
        self.value[q] += dir * t;

        let leaving = self.head[r];
        if to_upper {
            self.value[leaving] = self.upper[leaving];
            self.state[leaving] = VarState::AtUpper;
        } else {
            self.value[leaving] = self.lower[leaving];
            self.state[leaving] = VarState::AtLower;
        }
        self.state[q] = VarState::Basic;
        self.head[r] = q;
        self.update_inverse(r, &alpha);
        *stalled = if t <= DEGENERATE_STEP { *stalled + 1 } else { 0 };

        self.pivots_since_refactor += 1;
        if self.pivots_since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        Ok(Step::Continue)
    }

    fn update_inverse(&mut self, r: usize, alpha: &[f64]) {
        let m = self.m;
        let piv = alpha[r];
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (pivot_row, after) = rest.split_at_mut(m);
        for v in pivot_row.iter_mut() {
            *v /= piv;
        }
        for (i, row) in before.chunks_mut(m).enumerate() {
            let f = alpha[i];
            if f != 0.0 {
                for (a, &p) in row.iter_mut().zip(pivot_row.iter()) {
                    *a -= f * p;
                }
            }
        }
        for (off, row) in after.chunks_mut(m).enumerate() {
            let f = alpha[r + 1 + off];
            if f != 0.0 {
                for (a, &p) in row.iter_mut().zip(pivot_row.iter()) {
                    *a -= f * p;
                }
            }
        }
    }

    /// Recomputes `B⁻¹` by Gauss-Jordan elimination and the basic values from
    /// the nonbasic ones.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        self.pivots_since_refactor = 0;
        if m == 0 {
            return Ok(());
        }
        let mut b = vec![0.0; m * m];
        for (pos, &j) in self.head.iter().enumerate() {
            if j < self.n {
                for &(k, v) in &self.cols[j] {
                    b[k * m + pos] = v;
                }
            } else {
                b[(j - self.n) * m + pos] = -1.0;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let (p, pv) = (col..m)
                .map(|r| (r, b[r * m + col].abs()))
                .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pv < 1e-11 {
                return Err(Error::NumericalBreakdown("singular basis during refactorisation".into()));
            }
            if p != col {
                for k in 0..m {
                    b.swap(p * m + k, col * m + k);
                    inv.swap(p * m + k, col * m + k);
                }
            }
            let d = b[col * m + col];
            for k in 0..m {
                b[col * m + k] /= d;
                inv[col * m + k] /= d;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = b[r * m + col];
                if f == 0.0 {
                    continue;
                }
                for k in 0..m {
                    b[r * m + k] -= f * b[col * m + k];
                    inv[r * m + k] -= f * inv[col * m + k];
                }
            }
        }
        // Rows of `inv` are indexed by basic position, columns by constraint.
        self.binv = inv;

        // x_B = B⁻¹ (−N x_N)
        let mut rhs = vec![0.0; m];
        for j in 0..self.n {
            if self.state[j] != VarState::Basic && self.value[j] != 0.0 {
                for &(k, v) in &self.cols[j] {
                    rhs[k] -= v * self.value[j];
                }
            }
        }
        for i in 0..m {
            let j = self.n + i;
            if self.state[j] != VarState::Basic {
                rhs[i] += self.value[j];
            }
        }
        for (pos, &j) in self.head.iter().enumerate() {
            self.value[j] = (0..m).map(|k| self.binv[pos * m + k] * rhs[k]).sum();
        }
        Ok(())
    }

    fn finish_optimal(self) -> LpResult {
        let m = self.m;
        let cb: Vec<f64> = self.head.iter().map(|&j| self.cost(j)).collect();
        let y = self.btran(&cb);
        let reduced: Vec<f64> = (0..self.n)
            .map(|j| {
                if self.state[j] == VarState::Basic {
                    0.0
                } else {
                    self.reduced_cost(j, self.cost(j), &y)
                }
            })
            .collect();
        let x: Vec<f64> = self.value[..self.n]
            .iter()
            .enumerate()
            .map(|(j, &v)| v.clamp(self.lower[j], self.upper[j]))
            .collect();
        let objective = x.iter().zip(&self.model.objective).map(|(a, b)| a * b).sum();
        debug_assert!({
            let dual_obj: f64 = (0..m).map(|i| y[i] * self.value[self.n + i]).sum::<f64>()
                + reduced.iter().zip(&x).map(|(d, v)| d * v).sum::<f64>();
            let o: f64 = objective;
            (dual_obj - o).abs() <= 1e-6 * (1.0 + o.abs())
        });
        LpResult {
            status: LpStatus::Optimal,
            objective,
            x,
            duals: y,
            reduced_costs: reduced,
            farkas: None,
            iterations: self.iterations,
        }
    }

    fn finish(self, status: LpStatus, farkas: Option<Vec<f64>>) -> LpResult {
        let objective = match status {
            LpStatus::Infeasible => f64::INFINITY,
            LpStatus::Unbounded => f64::NEG_INFINITY,
            LpStatus::Optimal => unreachable!(),
        };
        LpResult {
            status,
            objective,
            x: self.value[..self.n].to_vec(),
            duals: vec![0.0; self.m],
            reduced_costs: vec![0.0; self.n],
            farkas,
            iterations: self.iterations,
        }
    }
}

/// Checks a Farkas certificate against the model: returns the gap
/// `min_r y·r − max_x (Aᵀy)·x`, positive for a valid certificate.
pub fn farkas_gap(model: &LpModel, y: &[f64]) -> f64 {
    let n = model.num_vars();
    let mut aty = vec![0.0; n];
    for (i, row) in model.constraints.iter().enumerate() {
        for &(j, v) in &row.coeffs {
            aty[j] += y[i] * v;
        }
    }
    let scale = y.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let negligible = |c: f64| c.abs() <= 1e-9 * scale;
    let mut max_x = 0.0;
    for j in 0..n {
        let c = aty[j];
        if negligible(c) {
            continue;
        }
        let bound = if c > 0.0 { model.upper[j] } else { model.lower[j] };
        if !bound.is_finite() {
            return f64::NEG_INFINITY;
        }
        max_x += c * bound;
    }
    let mut min_r = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        if negligible(yi) {
            continue;
        }
        let (l, u) = model.row_bounds(i);
        let bound = if yi > 0.0 { l } else { u };
        if !bound.is_finite() {
            return f64::NEG_INFINITY;
        }
        min_r += yi * bound;
    }
    min_r - max_x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn one_variable_lp() {
        let mut lp = LpModel::new();
        let y = lp.add_var(1.0, 0.0, INF);
        lp.add_constraint(vec![(y, 1.0)], Sense::Ge, 1.0);
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert_abs_diff_eq!(r.objective, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.duals[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LpModel::new();
        lp.add_var(-1.0, 0.0, INF);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn contradictory_rows_give_certificate() {
        let mut lp = LpModel::new();
        let y = lp.add_var(0.0, 0.0, INF);
        lp.add_constraint(vec![(y, 1.0)], Sense::Ge, 1.0);
        lp.add_constraint(vec![(y, 1.0)], Sense::Le, 0.0);
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);
        let cert = r.farkas.unwrap();
        assert!(farkas_gap(&lp, &cert) > 1e-9, "certificate {cert:?}");
    }

    #[test]
    fn le_row_dual_is_nonpositive() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6
        let mut lp = LpModel::new();
        let x = lp.add_var(-1.0, 0.0, INF);
        let y = lp.add_var(-1.0, 0.0, INF);
        lp.add_constraint(vec![(x, 1.0), (y, 2.0)], Sense::Le, 4.0);
        lp.add_constraint(vec![(x, 3.0), (y, 1.0)], Sense::Le, 6.0);
        let r = solve_lp(&lp).unwrap();
        assert_abs_diff_eq!(r.objective, -2.8, epsilon = 1e-9);
        assert!(r.duals.iter().all(|&d| d <= 1e-12));
        let dual_obj = 4.0 * r.duals[0] + 6.0 * r.duals[1];
        assert_abs_diff_eq!(dual_obj, r.objective, epsilon = 1e-9);
    }

    #[test]
    fn equality_and_free_variables() {
        // min x - y s.t. x + y = 2, x - y >= -4, x free, y in [0, 5]
        let mut lp = LpModel::new();
        let x = lp.add_var(1.0, -INF, INF);
        let y = lp.add_var(-1.0, 0.0, 5.0);
        lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Sense::Eq, 2.0);
        lp.add_constraint(vec![(x, 1.0), (y, -1.0)], Sense::Ge, -4.0);
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert_abs_diff_eq!(r.objective, -4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.x[0], -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.x[1], 3.0, epsilon = 1e-9);
    }

    #[test]
    fn bounded_variables_flip() {
        // min -x - y with x, y in [0,1] and no rows
        let mut lp = LpModel::new();
        lp.add_var(-1.0, 0.0, 1.0);
        lp.add_var(-1.0, 0.0, 1.0);
        let r = solve_lp(&lp).unwrap();
        assert_abs_diff_eq!(r.objective, -2.0, epsilon = 1e-12);
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Beale's example, written as a minimisation.
        let mut lp = LpModel::new();
        let x: Vec<usize> = [-0.75, 150.0, -0.02, 6.0]
            .iter()
            .map(|&c| lp.add_var(c, 0.0, INF))
            .collect();
        lp.add_constraint(vec![(x[0], 0.25), (x[1], -60.0), (x[2], -0.04), (x[3], 9.0)], Sense::Le, 0.0);
        lp.add_constraint(vec![(x[0], 0.5), (x[1], -90.0), (x[2], -0.02), (x[3], 3.0)], Sense::Le, 0.0);
        lp.add_constraint(vec![(x[2], 1.0)], Sense::Le, 1.0);
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert_abs_diff_eq!(r.objective, -0.05, epsilon = 1e-9);
    }

    #[test]
    fn thm1_scenario_one_subproblem() {
        // min z s.t. z >= x - y, z >= y - x at x̂ = (1, 0): rows z >= 1, z >= -1.
        let mut lp = LpModel::new();
        let z = lp.add_var(1.0, 0.0, INF);
        lp.add_constraint(vec![(z, 1.0)], Sense::Ge, 1.0);
        lp.add_constraint(vec![(z, 1.0)], Sense::Ge, -1.0);
        let r = solve_lp(&lp).unwrap();
        assert_abs_diff_eq!(r.objective, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.duals[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.duals[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_inverted_bounds() {
        let mut lp = LpModel::new();
        lp.add_var(0.0, 1.0, 0.0);
        assert!(matches!(solve_lp(&lp), Err(Error::InvalidModel(_))));
    }
}
