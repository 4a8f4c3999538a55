//! Budget-of-uncertainty robust counterparts for linear rows.
//!
//! Each uncertain coefficient `a_ij` ranges over `[nominal - d_ij, nominal + d_ij]`.
//! With a normalised budget `gamma` in `[0, 1]`, at most `Gamma_i = gamma * |J_i|`
//! of the `J_i` uncertain entries in row `i` may move to their adverse extreme
//! (fractionally for the last one). The worst-case protection term
//!
//! ```text
//! max { sum_j d_ij |x_j| s_j : 0 <= s_j <= 1, sum_j s_j <= Gamma_i }
//! ```
//!
//! is replaced by its LP dual, which adds `z_i >= 0`, `p_ij >= 0` and
//!
//! ```text
//! a_i x + Gamma_i z_i + sum_j p_ij <= b_i        (>= rows: subtracted)
//! z_i + p_ij >= d_ij |x_j|
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::milp::{MilpProblem, ModelError, RowSense, VarId};

#[derive(Debug, Clone, PartialEq)]
pub struct UncertainCoefficient {
    /// Label of the constraint row.
    pub row: String,
    pub var: VarId,
    pub nominal: f64,
    /// Half-width of the symmetric range around `nominal`.
    pub deviation: f64,
}

impl UncertainCoefficient {
    pub fn new(row: impl Into<String>, var: VarId, nominal: f64, deviation: f64) -> Self {
        Self {
            row: row.into(),
            var,
            nominal,
            deviation,
        }
    }
}

/// Normalised budget `gamma` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct RobustBudget(f64);

impl RobustBudget {
    pub fn new(gamma: f64) -> Result<Self, RobustError> {
        if (0.0..=1.0).contains(&gamma) {
            Ok(Self(gamma))
        } else {
            Err(RobustError::BudgetOutOfRange(gamma))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for RobustBudget {
    type Error = RobustError;

    fn try_from(gamma: f64) -> Result<Self, Self::Error> {
        Self::new(gamma)
    }
}

impl From<RobustBudget> for f64 {
    fn from(b: RobustBudget) -> f64 {
        b.0
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RobustError {
    #[error("budget must lie in [0, 1], got {0}")]
    BudgetOutOfRange(f64),
    #[error("no constraint labelled '{0}'")]
    UnknownRow(String),
    #[error("constraint label '{0}' is not unique")]
    AmbiguousRow(String),
    #[error("uncertain coefficient on equality row '{0}'")]
    EqualityRow(String),
    #[error("uncertain coefficient in '{row}' references unknown variable {var}")]
    UnknownVariable { row: String, var: VarId },
    #[error("variable '{name}' in uncertain row '{row}' is unbounded in both signs")]
    FreeVariable { row: String, name: String },
    #[error("invalid deviation {deviation} for '{name}' in row '{row}'")]
    InvalidDeviation {
        row: String,
        name: String,
        deviation: f64,
    },
    #[error("nominal {nominal} for '{name}' in row '{row}' differs from model coefficient {model}")]
    NominalMismatch {
        row: String,
        name: String,
        nominal: f64,
        model: f64,
    },
    #[error("duplicate uncertain entry for '{name}' in row '{row}'")]
    Duplicate { row: String, name: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// How `|x_j|` is expressed for a variable in an uncertain term.
enum Magnitude {
    /// `x >= 0`, so `|x| = x`
    Positive,
    /// `x <= 0`, so `|x| = -x`
    Negative,
    /// bounded with mixed sign: needs `t >= x`, `t >= -x`
    Mixed,
}

/// Builds the budgeted robust counterpart of `problem`.
pub fn robustify(
    problem: &MilpProblem,
    uncertain: &[UncertainCoefficient],
    budget: RobustBudget,
) -> Result<MilpProblem, RobustError> {
    // Group entries per row, preserving first-appearance order.
    let mut groups: Vec<(usize, Vec<&UncertainCoefficient>)> = Vec::new();
    for entry in uncertain {
        let row = locate_row(problem, &entry.row)?;
        let con = &problem.constraints()[row];
        if con.sense == RowSense::Eq {
            return Err(RobustError::EqualityRow(entry.row.clone()));
        }
        if entry.var.index() >= problem.num_vars() {
            return Err(RobustError::UnknownVariable {
                row: entry.row.clone(),
                var: entry.var,
            });
        }
        let var = problem.variable(entry.var).clone();
        if !(entry.deviation.is_finite() && entry.deviation >= 0.0) {
            return Err(RobustError::InvalidDeviation {
                row: entry.row.clone(),
                name: var.name,
                deviation: entry.deviation,
            });
        }
        let model = con
            .terms
            .iter()
            .find(|(v, _)| *v == entry.var)
            .map_or(0.0, |(_, c)| *c);
        if (model - entry.nominal).abs() > 1e-12 * model.abs().max(1.0) {
            return Err(RobustError::NominalMismatch {
                row: entry.row.clone(),
                name: var.name,
                nominal: entry.nominal,
                model,
            });
        }
        match groups.iter_mut().find(|(r, _)| *r == row) {
            Some((_, list)) => {
                if list.iter().any(|e| e.var == entry.var) {
                    return Err(RobustError::Duplicate {
                        row: entry.row.clone(),
                        name: var.name,
                    });
                }
                list.push(entry);
            }
            None => groups.push((row, vec![entry])),
        }
    }

    let mut out = problem.clone();
    let mut magnitude_vars: Vec<Option<VarId>> = vec![None; problem.num_vars()];
    for (row, entries) in groups {
        let con = problem.constraints()[row].clone();
        let active: Vec<&UncertainCoefficient> =
            entries.into_iter().filter(|e| e.deviation > 0.0).collect();
        if active.is_empty() {
            continue;
        }
        let protection = budget.value() * active.len() as f64;
        // <= rows: protection consumes slack from above; >= rows: from below
        let sign = if con.sense == RowSense::Le { 1.0 } else { -1.0 };

        let z = out.add_continuous(format!("rc_z[{}]", con.label), 0.0, f64::INFINITY)?;
        out.add_term(row, z, sign * protection)?;
        for entry in active {
            let x = entry.var;
            let def = problem.variable(x);
            let kind = if def.lower >= 0.0 {
                Magnitude::Positive
            } else if def.upper <= 0.0 {
                Magnitude::Negative
            } else if def.lower.is_finite() && def.upper.is_finite() {
                Magnitude::Mixed
            } else {
                return Err(RobustError::FreeVariable {
                    row: con.label.clone(),
                    name: def.name.clone(),
                });
            };
            let p = out.add_continuous(
                format!("rc_p[{},{}]", con.label, def.name),
                0.0,
                f64::INFINITY,
            )?;
            out.add_term(row, p, sign)?;
            let (mag_var, mag_coef) = match kind {
                Magnitude::Positive => (x, 1.0),
                Magnitude::Negative => (x, -1.0),
                Magnitude::Mixed => {
                    let t = match magnitude_vars[x.index()] {
                        Some(t) => t,
                        None => {
                            let bound = def.lower.abs().max(def.upper.abs());
                            let t = out.add_continuous(format!("rc_abs[{}]", def.name), 0.0, bound)?;
                            out.add_constraint(
                                format!("rc_abs_pos[{}]", def.name),
                                [(t, 1.0), (x, -1.0)],
                                RowSense::Ge,
                                0.0,
                            )?;
                            out.add_constraint(
                                format!("rc_abs_neg[{}]", def.name),
                                [(t, 1.0), (x, 1.0)],
                                RowSense::Ge,
                                0.0,
                            )?;
                            magnitude_vars[x.index()] = Some(t);
                            t
                        }
                    };
                    (t, 1.0)
                }
            };
            out.add_constraint(
                format!("rc_link[{},{}]", con.label, def.name),
                [(z, 1.0), (p, 1.0), (mag_var, -entry.deviation * mag_coef)],
                RowSense::Ge,
                0.0,
            )?;
        }
    }
    Ok(out)
}

fn locate_row(problem: &MilpProblem, label: &str) -> Result<usize, RobustError> {
    let mut hits = problem
        .constraints()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.label == label)
        .map(|(i, _)| i);
    let first = hits
        .next()
        .ok_or_else(|| RobustError::UnknownRow(label.to_string()))?;
    if hits.next().is_some() {
        return Err(RobustError::AmbiguousRow(label.to_string()));
    }
    Ok(first)
}
