//! Brute-force reference solvers that share no code with the embedded engine.

use nexus_core::milp::{MilpProblem, RowSense, VarKind};
use nexus_core::robust::UncertainCoefficient;

#[derive(Debug, Clone, PartialEq)]
pub enum Oracle {
    Optimal { objective: f64, point: Vec<f64> },
    Infeasible,
}

impl Oracle {
    pub fn objective(&self) -> Option<f64> {
        match self {
            Oracle::Optimal { objective, .. } => Some(*objective),
            Oracle::Infeasible => None,
        }
    }
}

/// Gaussian elimination with partial pivoting; `None` when singular.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Calls `f` with every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

struct Halfspace {
    a: Vec<f64>,
    b: f64,
    eq: bool,
}

/// LP optimum by enumerating every intersection of `n` constraint or bound
/// hyperplanes. Integrality is ignored; variables whose entry in `fixed` is
/// `Some(v)` are substituted by `v`. All free variables need finite bounds.
pub fn lp_by_vertices(problem: &MilpProblem, fixed: &[Option<f64>]) -> Oracle {
    let vars = problem.variables();
    let free: Vec<usize> = (0..vars.len()).filter(|&j| fixed.get(j).copied().flatten().is_none()).collect();
    let value_of = |j: usize| fixed.get(j).copied().flatten().unwrap_or(0.0);
    let n = free.len();

    // everything as a x <= b (or == b) over the free variables
    let mut rows: Vec<Halfspace> = Vec::new();
    for con in problem.constraints() {
        let mut a = vec![0.0; n];
        let mut b = con.rhs;
        for &(var, coef) in &con.terms {
            match free.iter().position(|&j| j == var.index()) {
                Some(k) => a[k] += coef,
                None => b -= coef * value_of(var.index()),
            }
        }
        match con.sense {
            RowSense::Le => rows.push(Halfspace { a, b, eq: false }),
            RowSense::Ge => rows.push(Halfspace {
                a: a.iter().map(|v| -v).collect(),
                b: -b,
                eq: false,
            }),
            RowSense::Eq => rows.push(Halfspace { a, b, eq: true }),
        }
    }
    for (k, &j) in free.iter().enumerate() {
        let v = &vars[j];
        assert!(v.lower.is_finite() && v.upper.is_finite(), "oracle needs finite bounds");
        let mut up = vec![0.0; n];
        up[k] = 1.0;
        rows.push(Halfspace { a: up, b: v.upper, eq: false });
        let mut lo = vec![0.0; n];
        lo[k] = -1.0;
        rows.push(Halfspace { a: lo, b: -v.lower, eq: false });
    }

    let ids: Vec<_> = problem.var_ids().collect();
    let cost: Vec<f64> = free.iter().map(|&j| problem.objective_coefficient(ids[j])).collect();
    let constant: f64 = (0..vars.len())
        .filter(|j| !free.contains(j))
        .map(|j| problem.objective_coefficient(ids[j]) * value_of(j))
        .sum();

    let feasible = |x: &[f64]| {
        rows.iter().all(|h| {
            let lhs: f64 = h.a.iter().zip(x).map(|(a, x)| a * x).sum();
            let tol = 1e-9 * (1.0 + h.b.abs());
            if h.eq {
                (lhs - h.b).abs() <= tol
            } else {
                lhs <= h.b + tol
            }
        })
    };

    let full = |point: Vec<f64>| -> Vec<f64> {
        let mut out: Vec<f64> = (0..vars.len()).map(value_of).collect();
        for (k, &j) in free.iter().enumerate() {
            out[j] = point[k];
        }
        out
    };

    if n == 0 {
        return if feasible(&[]) {
            Oracle::Optimal {
                objective: constant,
                point: full(Vec::new()),
            }
        } else {
            Oracle::Infeasible
        };
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    for_each_subset(rows.len(), n, |subset| {
        let a: Vec<Vec<f64>> = subset.iter().map(|&i| rows[i].a.clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&i| rows[i].b).collect();
        let Some(x) = solve_dense(a, b) else { return };
        if !feasible(&x) {
            return;
        }
        let obj: f64 = constant + cost.iter().zip(&x).map(|(c, x)| c * x).sum::<f64>();
        if best.as_ref().map_or(true, |(b, _)| obj < *b) {
            best = Some((obj, x));
        }
    });
    match best {
        Some((objective, x)) => Oracle::Optimal {
            objective,
            point: full(x),
        },
        None => Oracle::Infeasible,
    }
}

/// MILP optimum by enumerating every 0/1 assignment of the binaries and
/// solving the remaining LP by vertex enumeration.
pub fn milp_by_enumeration(problem: &MilpProblem) -> Oracle {
    let binaries: Vec<usize> = problem
        .variables()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(j, _)| j)
        .collect();
    assert!(binaries.len() <= 20, "enumeration would not finish");
    let mut best = Oracle::Infeasible;
    for mask in 0u32..(1 << binaries.len()) {
        let mut fixed = vec![None; problem.num_vars()];
        let mut in_bounds = true;
        for (bit, &j) in binaries.iter().enumerate() {
            let v = f64::from((mask >> bit) & 1);
            let def = &problem.variables()[j];
            in_bounds &= def.lower <= v && v <= def.upper;
            fixed[j] = Some(v);
        }
        if !in_bounds {
            continue;
        }
        let candidate = lp_by_vertices(problem, &fixed);
        if let (Some(c), better) = (candidate.objective(), best.objective()) {
            if better.map_or(true, |b| c < b) {
                best = candidate;
            }
        }
    }
    best
}

/// The interval worst-case model: every row carrying uncertain entries is
/// replaced by one copy per extreme combination of its coefficients.
pub fn interval_worst_case(problem: &MilpProblem, uncertain: &[UncertainCoefficient]) -> MilpProblem {
    let mut out = MilpProblem::new(format!("{}-worst", problem.name()));
    for v in problem.variables() {
        out.add_var(v.name.clone(), v.lower, v.upper, v.kind).expect("copy var");
    }
    for (id, c) in problem.objective_terms() {
        out.add_objective(id, c).expect("copy objective");
    }
    for con in problem.constraints() {
        let entries: Vec<&UncertainCoefficient> = uncertain
            .iter()
            .filter(|u| u.row == con.label && u.deviation > 0.0)
            .collect();
        for mask in 0u32..(1 << entries.len()) {
            let mut base = con.terms.clone();
            for e in &entries {
                if !base.iter().any(|(v, _)| *v == e.var) {
                    base.push((e.var, 0.0));
                }
            }
            let terms: Vec<_> = base
                .iter()
                .map(|&(var, coef)| {
                    let shift = entries
                        .iter()
                        .position(|e| e.var == var)
                        .map_or(0.0, |k| {
                            let d = entries[k].deviation;
                            if (mask >> k) & 1 == 1 {
                                d
                            } else {
                                -d
                            }
                        });
                    (var, coef + shift)
                })
                .collect();
            out.add_constraint(format!("{}#{mask}", con.label), terms, con.sense, con.rhs)
                .expect("copy row");
        }
    }
    out
}
