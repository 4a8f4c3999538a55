//! Best-bound branch-and-bound over binary variables.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::simplex::{solve_with_bounds, LpOutcome};
use super::{MilpProblem, SolveResult, SolveStatus, SolverOptions, VarKind};

struct Node {
    bound: f64,
    depth: usize,
    seq: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
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
    // BinaryHeap is a max-heap: the "greatest" node is the one popped next,
    // i.e. lowest bound, then deepest, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

/// Solves `problem` to proven optimality over its binary variables.
///
/// Problems without binaries are passed straight to the LP solver.
pub fn solve_milp(problem: &MilpProblem, options: &SolverOptions) -> SolveResult {
    let binaries: Vec<usize> = problem
        .variables()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(j, _)| j)
        .collect();
    let mut lower: Vec<f64> = problem.variables().iter().map(|v| v.lower).collect();
    let mut upper: Vec<f64> = problem.variables().iter().map(|v| v.upper).collect();
    for &j in &binaries {
        lower[j] = lower[j].ceil();
        upper[j] = upper[j].floor();
    }

    let root = solve_with_bounds(problem, &lower, &upper, options);
    let mut pivots = root.pivots;
    if root.status != SolveStatus::Optimal || binaries.is_empty() {
        return LpOutcome { pivots, ..root }.into_result(1);
    }

    let tol = options.tolerances;
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let mut nodes = 1usize;
    heap.push(Node {
        bound: root.objective,
        depth: 0,
        seq,
        lower,
        upper,
        x: root.x,
    });

    let mut incumbent: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    let prune_at = |inc: f64| inc - tol.objective * inc.abs().max(1.0);

    while let Some(node) = heap.pop() {
        if let Some((best, _, _)) = &incumbent {
            if node.bound >= prune_at(*best) {
                break;
            }
        }
        let Some(branch_var) = most_fractional(&binaries, &node.x, tol.integrality) else {
            // Integral relaxation: keep it with the binaries pinned.
            let mut fixed_lo = node.lower.clone();
            let mut fixed_hi = node.upper.clone();
            for &j in &binaries {
                let v = node.x[j].round();
                fixed_lo[j] = v;
                fixed_hi[j] = v;
            }
            if incumbent.as_ref().map_or(true, |(best, _, _)| node.bound < *best) {
                incumbent = Some((node.bound, fixed_lo, fixed_hi));
            }
            continue;
        };

        for value in [0.0, 1.0] {
            if nodes >= options.max_nodes {
                return SolveResult::without_solution(SolveStatus::IterationLimit, pivots, nodes);
            }
            let mut lo = node.lower.clone();
            let mut hi = node.upper.clone();
            lo[branch_var] = value;
            hi[branch_var] = value;
            let child = solve_with_bounds(problem, &lo, &hi, options);
            nodes += 1;
            pivots += child.pivots;
            match child.status {
                SolveStatus::Optimal => {}
                SolveStatus::Infeasible => continue,
                SolveStatus::Unbounded => {
                    return SolveResult::without_solution(SolveStatus::Unbounded, pivots, nodes)
                }
                SolveStatus::IterationLimit => {
                    return SolveResult::without_solution(
                        SolveStatus::IterationLimit,
                        pivots,
                        nodes,
                    )
                }
            }
            if let Some((best, _, _)) = &incumbent {
                if child.objective >= prune_at(*best) {
                    continue;
                }
            }
            seq += 1;
            heap.push(Node {
                bound: child.objective,
                depth: node.depth + 1,
                seq,
                lower: lo,
                upper: hi,
                x: child.x,
            });
        }
    }

    match incumbent {
        None => SolveResult::without_solution(SolveStatus::Infeasible, pivots, nodes),
        Some((_, lo, hi)) => {
            // Re-solve with the binaries fixed so the reported point is exactly
            // integral and the continuous part is consistent with it.
            let polished = solve_with_bounds(problem, &lo, &hi, options);
            pivots += polished.pivots;
            LpOutcome { pivots, ..polished }.into_result(nodes)
        }
    }
}

/// Binary whose value is closest to one half; ties go to the lowest index.
fn most_fractional(binaries: &[usize], x: &[f64], tol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &j in binaries {
        let frac = (x[j] - x[j].floor()).min(x[j].ceil() - x[j]);
        if frac <= tol {
            continue;
        }
        if best.map_or(true, |(_, f)| frac > f) {
            best = Some((j, frac));
        }
    }
    best.map(|(j, _)| j)
}
