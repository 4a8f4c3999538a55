//! Linear / mixed-binary programming: model representation, an embedded
//! bounded-variable primal simplex with best-bound branch-and-bound, MPS export
//! and an adapter for external MPS-reading solvers.
//!
//! Every problem is a minimization. Variables carry finite or infinite bounds
//! and are either continuous or binary.

mod branch;
mod external;
mod mps;
mod simplex;

use std::fmt;

use thiserror::Error;

pub use branch::solve_milp;
pub use external::ExternalSolver;
pub use mps::{column_name, row_name, write_mps};
pub use simplex::solve_lp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableDef {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

impl RowSense {
    pub fn symbol(self) -> &'static str {
        match self {
            RowSense::Le => "<=",
            RowSense::Ge => ">=",
            RowSense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub label: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn coefficient(&self, var: VarId) -> f64 {
        self.terms
            .iter()
            .find(|(v, _)| *v == var)
            .map_or(0.0, |(_, c)| *c)
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(v, c)| c * x[v.0]).sum()
    }

    /// Amount by which `x` breaks this row (zero when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.sense {
            RowSense::Le => (lhs - self.rhs).max(0.0),
            RowSense::Ge => (self.rhs - lhs).max(0.0),
            RowSense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("variable '{name}' has invalid bounds [{lower}, {upper}]")]
    InvalidBounds { name: String, lower: f64, upper: f64 },
    #[error("binary variable '{0}' must have bounds within [0, 1]")]
    BinaryBounds(String),
    #[error("unknown variable id {0}")]
    UnknownVariable(VarId),
    #[error("non-finite coefficient in '{0}'")]
    NonFinite(String),
    #[error("unknown constraint index {0}")]
    UnknownConstraint(usize),
}

/// A minimization MILP.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MilpProblem {
    name: String,
    variables: Vec<VariableDef>,
    constraints: Vec<LinearConstraint>,
    objective: Vec<f64>,
}

impl MilpProblem {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        kind: VarKind,
    ) -> Result<VarId, ModelError> {
        let name = name.into();
        if lower.is_nan() || upper.is_nan() || lower > upper || lower == f64::INFINITY {
            return Err(ModelError::InvalidBounds { name, lower, upper });
        }
        if kind == VarKind::Binary && (lower < 0.0 || upper > 1.0) {
            return Err(ModelError::BinaryBounds(name));
        }
        self.variables.push(VariableDef {
            name,
            lower,
            upper,
            kind,
        });
        self.objective.push(0.0);
        Ok(VarId(self.variables.len() - 1))
    }

    pub fn add_continuous(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, ModelError> {
        self.add_var(name, lower, upper, VarKind::Continuous)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId, ModelError> {
        self.add_var(name, 0.0, 1.0, VarKind::Binary)
    }

    /// Adds a row; repeated variables in `terms` are summed and zeros dropped.
    pub fn add_constraint(
        &mut self,
        label: impl Into<String>,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        sense: RowSense,
        rhs: f64,
    ) -> Result<usize, ModelError> {
        let label = label.into();
        if !rhs.is_finite() {
            return Err(ModelError::NonFinite(label));
        }
        let mut row: Vec<(VarId, f64)> = Vec::new();
        for (var, coef) in terms {
            self.check_var(var)?;
            if !coef.is_finite() {
                return Err(ModelError::NonFinite(label));
            }
            match row.iter_mut().find(|(v, _)| *v == var) {
                Some((_, c)) => *c += coef,
                None => row.push((var, coef)),
            }
        }
        row.retain(|(_, c)| *c != 0.0);
        self.constraints.push(LinearConstraint {
            label,
            terms: row,
            sense,
            rhs,
        });
        Ok(self.constraints.len() - 1)
    }

    /// Adds `coef * var` to an existing row.
    pub fn add_term(&mut self, row: usize, var: VarId, coef: f64) -> Result<(), ModelError> {
        self.check_var(var)?;
        let c = self
            .constraints
            .get_mut(row)
            .ok_or(ModelError::UnknownConstraint(row))?;
        if !coef.is_finite() {
            return Err(ModelError::NonFinite(c.label.clone()));
        }
        match c.terms.iter_mut().find(|(v, _)| *v == var) {
            Some((_, existing)) => *existing += coef,
            None => c.terms.push((var, coef)),
        }
        c.terms.retain(|(_, v)| *v != 0.0);
        Ok(())
    }

    /// Adds `cost` to the objective coefficient of `var`.
    pub fn add_objective(&mut self, var: VarId, cost: f64) -> Result<(), ModelError> {
        self.check_var(var)?;
        if !cost.is_finite() {
            return Err(ModelError::NonFinite(format!("objective[{var}]")));
        }
        self.objective[var.0] += cost;
        Ok(())
    }

    fn check_var(&self, var: VarId) -> Result<(), ModelError> {
        if var.0 < self.variables.len() {
            Ok(())
        } else {
            Err(ModelError::UnknownVariable(var))
        }
    }

    pub fn variables(&self) -> &[VariableDef] {
        &self.variables
    }

    pub fn variable(&self, var: VarId) -> &VariableDef {
        &self.variables[var.0]
    }

    pub fn var_ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.variables.len()).map(VarId)
    }

    pub fn find_var(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn constraint(&self, row: usize) -> Option<&LinearConstraint> {
        self.constraints.get(row)
    }

    pub fn find_constraint(&self, label: &str) -> Option<usize> {
        self.constraints.iter().position(|c| c.label == label)
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective_coefficient(&self, var: VarId) -> f64 {
        self.objective[var.0]
    }

    /// Nonzero objective entries in variable order.
    pub fn objective_terms(&self) -> impl Iterator<Item = (VarId, f64)> + '_ {
        self.objective
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(j, c)| (VarId(j), *c))
    }

    pub fn evaluate_objective(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn has_binaries(&self) -> bool {
        self.variables.iter().any(|v| v.kind == VarKind::Binary)
    }

    /// Largest bound or row violation of `x`, recomputed from the model data.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let bounds = self
            .variables
            .iter()
            .zip(x)
            .map(|(v, &val)| (v.lower - val).max(val - v.upper).max(0.0));
        let rows = self.constraints.iter().map(|c| c.violation(x));
        bounds.chain(rows).fold(0.0, f64::max)
    }

    /// Largest distance of a binary variable from {0, 1}.
    pub fn max_integrality_gap(&self, x: &[f64]) -> f64 {
        self.variables
            .iter()
            .zip(x)
            .filter(|(v, _)| v.kind == VarKind::Binary)
            .map(|(_, &val)| (val - val.round()).abs())
            .fold(0.0, f64::max)
    }

    /// Copy of the problem with every binary relaxed to a continuous variable.
    pub fn relaxed(&self) -> MilpProblem {
        let mut p = self.clone();
        for v in &mut p.variables {
            v.kind = VarKind::Continuous;
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl SolveStatus {
    pub fn code(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::IterationLimit => "iteration_limit",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Present iff `status` is `Optimal`.
    pub objective: Option<f64>,
    /// Values indexed by `VarId`; empty unless a solution was found.
    pub assignment: Vec<f64>,
    pub pivots: usize,
    pub nodes: usize,
}

impl SolveResult {
    pub(crate) fn without_solution(status: SolveStatus, pivots: usize, nodes: usize) -> Self {
        Self {
            status,
            objective: None,
            assignment: Vec::new(),
            pivots,
            nodes,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn value(&self, var: VarId) -> Option<f64> {
        self.assignment.get(var.0).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub feasibility: f64,
    pub integrality: f64,
    pub objective: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            feasibility: 1e-7,
            integrality: 1e-6,
            objective: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Pivot budget for a single LP solve (both phases).
    pub max_pivots: usize,
    /// Branch-and-bound node budget.
    pub max_nodes: usize,
    pub tolerances: Tolerances,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_pivots: 50_000,
            max_nodes: 100_000,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("external solver I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("external solver exited with {0}")]
    ExternalExit(std::process::ExitStatus),
    #[error("could not read external solution: {0}")]
    SolutionFormat(String),
}

/// Anything that can solve a [`MilpProblem`].
pub trait MilpSolver: Send + Sync {
    fn solve(&self, problem: &MilpProblem) -> Result<SolveResult, SolverError>;
}

/// The built-in simplex / branch-and-bound engine.
#[derive(Debug, Clone, Copy, Default)]
pub struct EmbeddedSolver {
    pub options: SolverOptions,
}

impl EmbeddedSolver {
    pub fn new(options: SolverOptions) -> Self {
        Self { options }
    }
}

impl MilpSolver for EmbeddedSolver {
    fn solve(&self, problem: &MilpProblem) -> Result<SolveResult, SolverError> {
        Ok(solve_milp(problem, &self.options))
    }
}
