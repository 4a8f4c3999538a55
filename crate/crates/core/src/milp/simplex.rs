//! Dense-tableau, bounded-variable primal simplex (two phases).
//!
//! Variables are mapped to nonnegative columns with optional finite upper
//! bounds; nonbasic columns rest at either bound. Pricing is Dantzig's rule
//! until a run of degenerate pivots is seen, then Bland's lowest-index rule
//! until progress resumes. All ties break on the lowest column index, so the
//! pivot sequence is a pure function of the input.

use super::{MilpProblem, RowSense, SolveResult, SolveStatus, SolverOptions};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;
const DEGENERATE_RUN: usize = 50;

/// Solves the LP relaxation of `problem` (binaries treated as `[0, 1]`).
pub fn solve_lp(problem: &MilpProblem, options: &SolverOptions) -> SolveResult {
    let lower: Vec<f64> = problem.variables().iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = problem.variables().iter().map(|v| v.upper).collect();
    let out = solve_with_bounds(problem, &lower, &upper, options);
    out.into_result(0)
}

#[derive(Debug, Clone)]
pub(crate) struct LpOutcome {
    pub status: SolveStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl LpOutcome {
    pub(crate) fn into_result(self, nodes: usize) -> SolveResult {
        if self.status == SolveStatus::Optimal {
            SolveResult {
                status: self.status,
                objective: Some(self.objective),
                assignment: self.x,
                pivots: self.pivots,
                nodes,
            }
        } else {
            SolveResult::without_solution(self.status, self.pivots, nodes)
        }
    }

    fn failed(status: SolveStatus, pivots: usize) -> Self {
        Self {
            status,
            x: Vec::new(),
            objective: f64::NAN,
            pivots,
        }
    }
}

/// How an original variable maps onto nonnegative tableau columns.
#[derive(Debug, Clone, Copy)]
enum ColumnMap {
    /// `x = lower + y`
    Shifted { col: usize, lower: f64 },
    /// `x = upper - y`
    Mirrored { col: usize, upper: f64 },
    /// `x = y_pos - y_neg`
    Split { pos: usize, neg: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColState {
    AtLower,
    AtUpper,
    Basic,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// Row-major `rows x cols`, holds `B^-1 A`.
    data: Vec<f64>,
    /// Current values of basic columns.
    beta: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<ColState>,
    upper: Vec<f64>,
    /// Reduced costs of the active phase.
    reduced: Vec<f64>,
    first_artificial: usize,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn recompute_reduced(&mut self, costs: &[f64]) {
        let mut d = costs.to_vec();
        for i in 0..self.rows {
            let cb = costs[self.basis[i]];
            if cb != 0.0 {
                for (dj, a) in d.iter_mut().zip(self.row(i)) {
                    *dj -= cb * a;
                }
            }
        }
        for i in 0..self.rows {
            d[self.basis[i]] = 0.0;
        }
        self.reduced = d;
    }

    fn choose_entering(&self, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.cols {
            let score = match self.state[j] {
                ColState::Basic => continue,
                _ if self.upper[j] == 0.0 => continue,
                ColState::AtLower if self.reduced[j] < -COST_TOL => -self.reduced[j],
                ColState::AtUpper if self.reduced[j] > COST_TOL => self.reduced[j],
                _ => continue,
            };
            if bland {
                return Some(j);
            }
            if best.map_or(true, |(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        best.map(|(j, _)| j)
    }

    /// Ratio test for entering column `q` moving in direction `dir` (+1 up,
    /// -1 down). Returns the step, and the leaving row with its target bound
    /// (`None` means the entering column just flips to its other bound).
    fn ratio_test(&self, q: usize, dir: f64, bland: bool) -> Option<(f64, Option<(usize, ColState)>)> {
        let mut step = self.upper[q];
        let mut leave: Option<(usize, ColState)> = None;
        let mut leave_pivot = 0.0_f64;
        for i in 0..self.rows {
            let a = self.at(i, q);
            if a.abs() < PIVOT_TOL {
                continue;
            }
            let delta = -a * dir;
            let b = self.basis[i];
            let (limit, target) = if delta < 0.0 {
                (self.beta[i].max(0.0) / -delta, ColState::AtLower)
            } else if self.upper[b].is_finite() {
                ((self.upper[b] - self.beta[i]).max(0.0) / delta, ColState::AtUpper)
            } else {
                continue;
            };
            let tie_band = 1e-12 * (1.0 + step.abs().min(limit.abs()));
            let better = if limit < step - tie_band {
                true
            } else if limit <= step + tie_band {
                match leave {
                    // a tie with the entering column's own bound flip keeps the flip
                    None => false,
                    Some((r, _)) if bland => b < self.basis[r],
                    Some((r, _)) => {
                        a.abs() > leave_pivot
                            || (a.abs() == leave_pivot && b < self.basis[r])
                    }
                }
            } else {
                false
            };
            if better {
                step = limit;
                leave = Some((i, target));
                leave_pivot = a.abs();
            }
        }
        if step.is_infinite() {
            None
        } else {
            Some((step, leave))
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let cols = self.cols;
        let p = self.at(r, q);
        let start = r * cols;
        for v in &mut self.data[start..start + cols] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.data[start..start + cols].to_vec();
        let nz: Vec<usize> = (0..cols).filter(|&j| pivot_row[j] != 0.0).collect();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.data[i * cols + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.data[i * cols..(i + 1) * cols];
            for &j in &nz {
                row[j] -= f * pivot_row[j];
            }
            row[q] = 0.0;
        }
        let dq = self.reduced[q];
        if dq != 0.0 {
            for &j in &nz {
                self.reduced[j] -= dq * pivot_row[j];
            }
            self.reduced[q] = 0.0;
        }
    }

    /// Runs simplex iterations on the current reduced costs.
    fn iterate(&mut self, pivots: &mut usize, max_pivots: usize) -> SolveStatus {
        let mut degenerate = 0usize;
        loop {
            let bland = degenerate >= DEGENERATE_RUN;
            let Some(q) = self.choose_entering(bland) else {
                return SolveStatus::Optimal;
            };
            if *pivots >= max_pivots {
                return SolveStatus::IterationLimit;
            }
            *pivots += 1;
            let dir = if self.state[q] == ColState::AtLower { 1.0 } else { -1.0 };
            let Some((step, leave)) = self.ratio_test(q, dir, bland) else {
                return SolveStatus::Unbounded;
            };
            if step <= DEGENERATE_STEP {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            if step > 0.0 {
                for i in 0..self.rows {
                    let a = self.at(i, q);
                    if a != 0.0 {
                        self.beta[i] -= a * dir * step;
                    }
                }
            }
            match leave {
                None => {
                    self.state[q] = if dir > 0.0 {
                        ColState::AtUpper
                    } else {
                        ColState::AtLower
                    };
                }
                Some((r, target)) => {
                    let entering_value = if dir > 0.0 {
                        step
                    } else {
                        self.upper[q] - step
                    };
                    let out = self.basis[r];
                    self.pivot(r, q);
                    self.state[out] = target;
                    self.state[q] = ColState::Basic;
                    self.basis[r] = q;
                    self.beta[r] = entering_value;
                }
            }
        }
    }

    fn column_value(&self, j: usize) -> f64 {
        match self.state[j] {
            ColState::AtLower => 0.0,
            ColState::AtUpper => self.upper[j],
            ColState::Basic => 0.0,
        }
    }
}

/// Sparse standard-form rows `A y (+ slack) = b`, after sign normalisation.
struct StandardForm {
    rows: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    /// Column of the unit vector that starts basic in each row.
    initial_basis: Vec<usize>,
    structural: usize,
    cols: usize,
    upper: Vec<f64>,
    costs: Vec<f64>,
    first_artificial: usize,
}

pub(crate) fn solve_with_bounds(
    problem: &MilpProblem,
    lower: &[f64],
    upper: &[f64],
    options: &SolverOptions,
) -> LpOutcome {
    let feas = options.tolerances.feasibility;
    let n = problem.num_vars();
    for j in 0..n {
        if lower[j] > upper[j] + feas {
            return LpOutcome::failed(SolveStatus::Infeasible, 0);
        }
    }

    let mut maps = Vec::with_capacity(n);
    let mut col_upper = Vec::new();
    let mut col_cost = Vec::new();
    for j in 0..n {
        let (lo, hi) = (lower[j], upper[j].max(lower[j]));
        let c = problem.objective[j];
        if lo.is_finite() {
            maps.push(ColumnMap::Shifted { col: col_upper.len(), lower: lo });
            col_upper.push(hi - lo);
            col_cost.push(c);
        } else if hi.is_finite() {
            maps.push(ColumnMap::Mirrored { col: col_upper.len(), upper: hi });
            col_upper.push(f64::INFINITY);
            col_cost.push(-c);
        } else {
            let pos = col_upper.len();
            maps.push(ColumnMap::Split { pos, neg: pos + 1 });
            col_upper.extend([f64::INFINITY, f64::INFINITY]);
            col_cost.extend([c, -c]);
        }
    }
    let structural = col_upper.len();

    // Structural part of each row and the shifted right-hand side.
    let m = problem.num_constraints();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for con in problem.constraints() {
        let mut row = Vec::with_capacity(con.terms.len());
        let mut b = con.rhs;
        for &(var, a) in &con.terms {
            match maps[var.index()] {
                ColumnMap::Shifted { col, lower } => {
                    row.push((col, a));
                    b -= a * lower;
                }
                ColumnMap::Mirrored { col, upper } => {
                    row.push((col, -a));
                    b -= a * upper;
                }
                ColumnMap::Split { pos, neg } => {
                    row.push((pos, a));
                    row.push((neg, -a));
                }
            }
        }
        rows.push(row);
        rhs.push(b);
    }

    // Slacks, sign normalisation, and the starting basis.
    let mut cols = structural;
    let mut slack_of = vec![None; m];
    for (i, con) in problem.constraints().iter().enumerate() {
        let coef = match con.sense {
            RowSense::Le => 1.0,
            RowSense::Ge => -1.0,
            RowSense::Eq => continue,
        };
        slack_of[i] = Some((cols, coef));
        cols += 1;
    }
    let first_artificial = cols;
    let mut initial_basis = vec![0; m];
    for i in 0..m {
        let slack_sign = slack_of[i].map(|(_, s)| s);
        let flip = rhs[i] < 0.0 || (rhs[i] == 0.0 && slack_sign == Some(-1.0));
        if flip {
            rhs[i] = -rhs[i];
            for (_, a) in &mut rows[i] {
                *a = -*a;
            }
            if let Some((_, s)) = &mut slack_of[i] {
                *s = -*s;
            }
        }
        if let Some((col, s)) = slack_of[i] {
            rows[i].push((col, s));
            if s > 0.0 {
                initial_basis[i] = col;
                continue;
            }
        }
        rows[i].push((cols, 1.0));
        initial_basis[i] = cols;
        cols += 1;
    }
    col_upper.resize(cols, f64::INFINITY);
    col_cost.resize(cols, 0.0);

    let form = StandardForm {
        rows,
        rhs,
        initial_basis,
        structural,
        cols,
        upper: col_upper,
        costs: col_cost,
        first_artificial,
    };
    run_two_phase(problem, &form, &maps, options)
}

fn run_two_phase(
    problem: &MilpProblem,
    form: &StandardForm,
    maps: &[ColumnMap],
    options: &SolverOptions,
) -> LpOutcome {
    let m = form.rows.len();
    let cols = form.cols;
    let mut data = vec![0.0; m * cols];
    for (i, row) in form.rows.iter().enumerate() {
        for &(j, a) in row {
            data[i * cols + j] += a;
        }
    }
    let mut state = vec![ColState::AtLower; cols];
    for &b in &form.initial_basis {
        state[b] = ColState::Basic;
    }
    let mut t = Tableau {
        rows: m,
        cols,
        data,
        beta: form.rhs.clone(),
        basis: form.initial_basis.clone(),
        state,
        upper: form.upper.clone(),
        reduced: Vec::new(),
        first_artificial: form.first_artificial,
    };
    let mut pivots = 0usize;

    let has_artificials = form.cols > form.first_artificial;
    if has_artificials {
        let mut phase1 = vec![0.0; cols];
        for c in &mut phase1[form.first_artificial..] {
            *c = 1.0;
        }
        t.recompute_reduced(&phase1);
        match t.iterate(&mut pivots, options.max_pivots) {
            SolveStatus::Optimal => {}
            SolveStatus::Unbounded => unreachable!("phase one objective is bounded below"),
            other => return LpOutcome::failed(other, pivots),
        }
        let scale = 1.0 + form.rhs.iter().fold(0.0_f64, |acc, b| acc.max(b.abs()));
        let infeasibility: f64 = (0..m)
            .filter(|&i| t.basis[i] >= t.first_artificial)
            .map(|i| t.beta[i].max(0.0))
            .sum();
        if infeasibility > options.tolerances.feasibility * scale {
            return LpOutcome::failed(SolveStatus::Infeasible, pivots);
        }
        // Artificials are pinned to zero for the rest of the solve.
        for j in form.first_artificial..cols {
            t.upper[j] = 0.0;
        }
    }

    t.recompute_reduced(&form.costs);
    match t.iterate(&mut pivots, options.max_pivots) {
        SolveStatus::Optimal => {}
        other => return LpOutcome::failed(other, pivots),
    }

    refine_basic_values(&mut t, form);

    let mut y = vec![0.0; cols];
    for j in 0..cols {
        y[j] = t.column_value(j);
    }
    for i in 0..m {
        y[t.basis[i]] = t.beta[i];
    }
    for j in 0..form.structural {
        y[j] = y[j].clamp(0.0, form.upper[j]);
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            ColumnMap::Shifted { col, lower } => lower + y[col],
            ColumnMap::Mirrored { col, upper } => upper - y[col],
            ColumnMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let objective = problem.evaluate_objective(&x);
    LpOutcome {
        status: SolveStatus::Optimal,
        x,
        objective,
        pivots,
    }
}

/// Recomputes basic values as `B^-1 (b - N x_N)` from the original rows.
///
/// The starting basis is a set of unit columns, so `B^-1` can be read off the
/// tableau columns of those starting variables.
fn refine_basic_values(t: &mut Tableau, form: &StandardForm) {
    let m = t.rows;
    let mut residual = form.rhs.clone();
    for (i, row) in form.rows.iter().enumerate() {
        for &(j, a) in row {
            if t.state[j] == ColState::AtUpper {
                residual[i] -= a * t.upper[j];
            }
        }
    }
    let mut beta = vec![0.0; m];
    for (i, b) in beta.iter_mut().enumerate() {
        let row = t.row(i);
        *b = form
            .initial_basis
            .iter()
            .zip(&residual)
            .map(|(&col, r)| row[col] * r)
            .sum();
    }
    t.beta = beta;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{MilpProblem, RowSense, SolveStatus};

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn box_optimum() {
        let mut p = MilpProblem::new("box");
        let x = p.add_continuous("x", 0.0, f64::INFINITY).unwrap();
        let y = p.add_continuous("y", 0.0, f64::INFINITY).unwrap();
        p.add_objective(x, -1.0).unwrap();
        p.add_objective(y, -1.0).unwrap();
        p.add_constraint("cx", [(x, 1.0)], RowSense::Le, 2.0).unwrap();
        p.add_constraint("cy", [(y, 1.0)], RowSense::Le, 3.0).unwrap();
        let r = solve_lp(&p, &opts());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective.unwrap() + 5.0).abs() < 1e-9);
        assert!((r.assignment[0] - 2.0).abs() < 1e-9);
        assert!((r.assignment[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn binding_lower_bound_row() {
        let mut p = MilpProblem::new("bind");
        let x = p.add_continuous("x", 0.0, f64::INFINITY).unwrap();
        p.add_objective(x, 1.0).unwrap();
        p.add_constraint("a", [(x, 1.0)], RowSense::Ge, 4.0).unwrap();
        p.add_constraint("b", [(x, 1.0)], RowSense::Ge, 1.0).unwrap();
        let r = solve_lp(&p, &opts());
        assert!((r.objective.unwrap() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = MilpProblem::new("inf");
        let x = p.add_continuous("x", 0.0, 10.0).unwrap();
        p.add_constraint("a", [(x, 1.0)], RowSense::Ge, 11.0).unwrap();
        assert_eq!(solve_lp(&p, &opts()).status, SolveStatus::Infeasible);

        let mut p = MilpProblem::new("unb");
        let x = p.add_continuous("x", 0.0, f64::INFINITY).unwrap();
        let y = p.add_continuous("y", 0.0, f64::INFINITY).unwrap();
        p.add_objective(x, -1.0).unwrap();
        p.add_constraint("a", [(x, 1.0), (y, -1.0)], RowSense::Le, 1.0).unwrap();
        assert_eq!(solve_lp(&p, &opts()).status, SolveStatus::Unbounded);
    }

    #[test]
    fn free_and_negative_variables() {
        // min x + y with x free, y <= -1, x - y >= 3
        let mut p = MilpProblem::new("free");
        let x = p.add_continuous("x", f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let y = p.add_continuous("y", f64::NEG_INFINITY, -1.0).unwrap();
        p.add_objective(x, 1.0).unwrap();
        p.add_objective(y, 2.0).unwrap();
        p.add_constraint("a", [(x, 1.0), (y, -1.0)], RowSense::Ge, 3.0).unwrap();
        p.add_constraint("b", [(y, 1.0)], RowSense::Ge, -5.0).unwrap();
        let r = solve_lp(&p, &opts());
        // x = 3 + y, objective 3 + 3y minimised at y = -5
        assert!((r.objective.unwrap() + 12.0).abs() < 1e-9);
        assert!((r.assignment[1] + 5.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_upper_bounds() {
        // min -x - 2y, x + y = 3, x in [0, 2], y in [0, 2]
        let mut p = MilpProblem::new("eq");
        let x = p.add_continuous("x", 0.0, 2.0).unwrap();
        let y = p.add_continuous("y", 0.0, 2.0).unwrap();
        p.add_objective(x, -1.0).unwrap();
        p.add_objective(y, -2.0).unwrap();
        p.add_constraint("e", [(x, 1.0), (y, 1.0)], RowSense::Eq, 3.0).unwrap();
        let r = solve_lp(&p, &opts());
        assert!((r.objective.unwrap() + 5.0).abs() < 1e-9);
        assert!(p.max_violation(&r.assignment) < 1e-9);
    }

    #[test]
    fn beale_cycling_example_terminates() {
        let mut p = MilpProblem::new("beale");
        let v: Vec<_> = (0..4)
            .map(|i| p.add_continuous(format!("x{i}"), 0.0, f64::INFINITY).unwrap())
            .collect();
        for (var, c) in v.iter().zip([-0.75, 150.0, -0.02, 6.0]) {
            p.add_objective(*var, c).unwrap();
        }
        p.add_constraint(
            "r1",
            v.iter().copied().zip([0.25, -60.0, -0.04, 9.0]),
            RowSense::Le,
            0.0,
        )
        .unwrap();
        p.add_constraint(
            "r2",
            v.iter().copied().zip([0.5, -90.0, -0.02, 3.0]),
            RowSense::Le,
            0.0,
        )
        .unwrap();
        p.add_constraint("r3", [(v[2], 1.0)], RowSense::Le, 1.0).unwrap();
        let r = solve_lp(&p, &opts());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective.unwrap() + 0.05).abs() < 1e-9);
    }

    #[test]
    fn pivot_budget_is_enforced() {
        let mut p = MilpProblem::new("budget");
        let x = p.add_continuous("x", 0.0, f64::INFINITY).unwrap();
        let y = p.add_continuous("y", 0.0, f64::INFINITY).unwrap();
        p.add_objective(x, -1.0).unwrap();
        p.add_objective(y, -1.0).unwrap();
        p.add_constraint("a", [(x, 1.0), (y, 2.0)], RowSense::Le, 4.0).unwrap();
        p.add_constraint("b", [(x, 3.0), (y, 1.0)], RowSense::Le, 6.0).unwrap();
        let tight = SolverOptions {
            max_pivots: 0,
            ..SolverOptions::default()
        };
        assert_eq!(solve_lp(&p, &tight).status, SolveStatus::IterationLimit);
    }
}
