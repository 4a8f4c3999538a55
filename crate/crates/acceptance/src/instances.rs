//! Seeded random instances for the oracle comparisons.

use rand::Rng;

use nexus_core::fuzzy::TrapezoidalFuzzyNumber;
use nexus_core::milp::{MilpProblem, RowSense, VarId};
use nexus_core::robust::UncertainCoefficient;

/// Trapezoid with every gap at least `0.01`.
pub fn trapezoid<R: Rng>(rng: &mut R) -> TrapezoidalFuzzyNumber {
    let start = rng.gen_range(-50.0..50.0);
    let mut points = [start; 4];
    for i in 1..4 {
        points[i] = points[i - 1] + rng.gen_range(0.01..10.0);
    }
    let [a, b, c, d] = points;
    TrapezoidalFuzzyNumber::new(a, b, c, d).expect("ordered points")
}

fn coefficient<R: Rng>(rng: &mut R) -> f64 {
    // half-integers keep vertices well separated from degeneracy noise
    f64::from(rng.gen_range(-10i32..=10)) / 2.0
}

fn random_sense<R: Rng>(rng: &mut R, allow_eq: bool) -> RowSense {
    match rng.gen_range(0..20) {
        0..=8 => RowSense::Le,
        9..=17 => RowSense::Ge,
        _ if allow_eq => RowSense::Eq,
        _ => RowSense::Le,
    }
}

/// Rows whose right-hand sides are loosened around a random point of the box,
/// so most instances are feasible; some are made infeasible on purpose.
fn add_rows<R: Rng>(rng: &mut R, p: &mut MilpProblem, vars: &[VarId], anchor: &[f64], rows: usize) {
    let infeasible = rng.gen_bool(0.1);
    for i in 0..rows {
        let mut terms: Vec<(VarId, f64)> = Vec::new();
        for &v in vars {
            if rng.gen_bool(0.7) {
                terms.push((v, coefficient(rng)));
            }
        }
        let sense = random_sense(rng, true);
        let activity: f64 = terms.iter().map(|&(v, a)| a * anchor[v.index()]).sum();
        let slack = f64::from(rng.gen_range(0..6));
        let mut rhs = match sense {
            RowSense::Le => activity + slack,
            RowSense::Ge => activity - slack,
            RowSense::Eq => activity,
        };
        if infeasible && i == 0 {
            rhs = match sense {
                RowSense::Le => -1000.0,
                _ => 1000.0,
            };
        }
        p.add_constraint(format!("r{i}"), terms, sense, rhs).expect("valid row");
    }
}

/// Continuous LP with at most 6 boxed variables and 6 rows.
pub fn random_lp<R: Rng>(rng: &mut R) -> MilpProblem {
    let mut p = MilpProblem::new("lp");
    let n = rng.gen_range(1..=6);
    let mut anchor = Vec::new();
    let mut vars = Vec::new();
    for j in 0..n {
        let lower = if rng.gen_bool(0.7) { 0.0 } else { -f64::from(rng.gen_range(1..4)) };
        let upper = lower + f64::from(rng.gen_range(1..7));
        let v = p.add_continuous(format!("x{j}"), lower, upper).expect("bounds");
        p.add_objective(v, coefficient(rng)).expect("objective");
        anchor.push(f64::from(rng.gen_range(lower as i32..=upper as i32)));
        vars.push(v);
    }
    let rows = rng.gen_range(1..=6);
    add_rows(rng, &mut p, &vars, &anchor, rows);
    p
}

/// Up to 12 binaries plus up to 2 boxed continuous variables, at most 6 rows.
pub fn random_milp<R: Rng>(rng: &mut R) -> MilpProblem {
    let mut p = MilpProblem::new("milp");
    let binaries = rng.gen_range(1..=12);
    let continuous = rng.gen_range(0..=2);
    let mut anchor = Vec::new();
    let mut vars = Vec::new();
    for j in 0..binaries {
        let v = p.add_binary(format!("b{j}")).expect("binary");
        p.add_objective(v, coefficient(rng)).expect("objective");
        anchor.push(f64::from(rng.gen_range(0..=1)));
        vars.push(v);
    }
    for j in 0..continuous {
        let v = p.add_continuous(format!("y{j}"), 0.0, 4.0).expect("bounds");
        p.add_objective(v, coefficient(rng)).expect("objective");
        anchor.push(rng.gen_range(0.0..4.0));
        vars.push(v);
    }
    let rows = rng.gen_range(1..=6);
    add_rows(rng, &mut p, &vars, &anchor, rows);
    p
}

/// Boxed continuous problem with 1 to 3 inequality rows, each carrying 1 to 3
/// uncertain coefficients. The origin is robustly feasible for every budget.
pub fn random_robust<R: Rng>(rng: &mut R) -> (MilpProblem, Vec<UncertainCoefficient>) {
    let mut p = MilpProblem::new("robust");
    let n = rng.gen_range(2..=4);
    let mut vars = Vec::new();
    for j in 0..n {
        let (lower, upper) = if rng.gen_bool(0.25) { (-2.0, 3.0) } else { (0.0, 5.0) };
        let v = p.add_continuous(format!("x{j}"), lower, upper).expect("bounds");
        p.add_objective(v, coefficient(rng)).expect("objective");
        vars.push(v);
    }
    let mut uncertain = Vec::new();
    for i in 0..rng.gen_range(1..=3) {
        let label = format!("r{i}");
        let terms: Vec<(VarId, f64)> = vars
            .iter()
            .map(|&v| (v, f64::from(rng.gen_range(1..=6)) / 2.0))
            .collect();
        let (sense, rhs, sign) = if rng.gen_bool(0.5) {
            (RowSense::Le, f64::from(rng.gen_range(2..12)), 1.0)
        } else {
            (RowSense::Ge, -f64::from(rng.gen_range(2..12)), -1.0)
        };
        let terms: Vec<(VarId, f64)> = terms.into_iter().map(|(v, a)| (v, sign * a)).collect();
        let k = rng.gen_range(1..=3.min(n));
        for &(v, a) in terms.iter().take(k) {
            let deviation = f64::from(rng.gen_range(1..=4)) / 4.0;
            uncertain.push(UncertainCoefficient::new(&label, v, a, deviation));
        }
        p.add_constraint(label, terms, sense, rhs).expect("row");
    }
    (p, uncertain)
}
