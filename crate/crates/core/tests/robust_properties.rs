use nexus_core::milp::{solve_lp, MilpProblem, RowSense, SolveStatus, SolverOptions, VarId};
use nexus_core::robust::{robustify, RobustBudget, UncertainCoefficient};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GAMMAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Maximising problem over a box with uncertain packing and covering rows.
fn instance(rng: &mut ChaCha8Rng) -> (MilpProblem, Vec<UncertainCoefficient>) {
    let mut p = MilpProblem::new("mc");
    let n = rng.gen_range(2..=5);
    let vars: Vec<VarId> = (0..n)
        .map(|j| {
            let (lo, hi) = if rng.gen_bool(0.3) { (-2.0, 4.0) } else { (0.0, 6.0) };
            let v = p.add_continuous(format!("x{j}"), lo, hi).unwrap();
            p.add_objective(v, -f64::from(rng.gen_range(1..=5))).unwrap();
            v
        })
        .collect();
    let mut uncertain = Vec::new();
    for i in 0..rng.gen_range(1..=3) {
        let label = format!("r{i}");
        let ge = rng.gen_bool(0.4);
        let sign = if ge { -1.0 } else { 1.0 };
        let terms: Vec<(VarId, f64)> = vars
            .iter()
            .map(|&v| (v, sign * f64::from(rng.gen_range(1..=8)) / 2.0))
            .collect();
        for &(v, a) in &terms {
            if rng.gen_bool(0.6) {
                let d = f64::from(rng.gen_range(1..=4)) / 4.0;
                uncertain.push(UncertainCoefficient::new(&label, v, a, d));
            }
        }
        let (sense, rhs) = if ge {
            (RowSense::Ge, -f64::from(rng.gen_range(4..16)))
        } else {
            (RowSense::Le, f64::from(rng.gen_range(4..16)))
        };
        p.add_constraint(label, terms, sense, rhs).unwrap();
    }
    (p, uncertain)
}

/// A realisation inside the budget: `floor(G)` entries at full deviation and
/// one more at the fractional remainder, signs random.
fn sample(
    rng: &mut ChaCha8Rng,
    problem: &MilpProblem,
    uncertain: &[UncertainCoefficient],
    gamma: f64,
) -> MilpProblem {
    let mut realised = problem.clone();
    for (row, con) in problem.constraints().iter().enumerate() {
        let mut entries: Vec<&UncertainCoefficient> =
            uncertain.iter().filter(|u| u.row == con.label).collect();
        entries.shuffle(rng);
        let budget = gamma * entries.len() as f64;
        let full = budget.floor() as usize;
        for (k, e) in entries.iter().enumerate() {
            let scale = if k < full {
                1.0
            } else if k == full {
                budget - budget.floor()
            } else {
                0.0
            };
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            if scale > 0.0 {
                realised.add_term(row, e.var, sign * scale * e.deviation).unwrap();
            }
        }
    }
    realised
}

#[test]
fn robust_solutions_survive_sampled_realisations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let options = SolverOptions::default();
    let mut checked = 0;
    while checked < 20 {
        let (problem, uncertain) = instance(&mut rng);
        for gamma in GAMMAS {
            let robust = robustify(&problem, &uncertain, RobustBudget::new(gamma).unwrap()).unwrap();
            let result = solve_lp(&robust, &options);
            if result.status != SolveStatus::Optimal {
                continue;
            }
            let x = &result.assignment[..problem.num_vars()];
            for _ in 0..1000 {
                let realised = sample(&mut rng, &problem, &uncertain, gamma);
                let v = realised.max_violation(x);
                assert!(v <= 1e-6, "gamma {gamma}: violation {v}");
            }
        }
        checked += 1;
    }
}

#[test]
fn robust_optimum_is_monotone_in_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let options = SolverOptions::default();
    for _ in 0..50 {
        let (problem, uncertain) = instance(&mut rng);
        let objectives: Vec<Option<f64>> = GAMMAS
            .iter()
            .map(|&g| {
                let robust = robustify(&problem, &uncertain, RobustBudget::new(g).unwrap()).unwrap();
                solve_lp(&robust, &options).objective
            })
            .collect();
        let nominal = solve_lp(&problem, &options).objective;
        match (objectives[0], nominal) {
            (Some(a), Some(b)) => assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0)),
            (a, b) => assert_eq!(a, b),
        }
        for w in objectives.windows(2) {
            match (w[0], w[1]) {
                (Some(a), Some(b)) => assert!(b >= a - 1e-9, "{objectives:?}"),
                (None, b) => assert!(b.is_none(), "{objectives:?}"),
                _ => {}
            }
        }
    }
}
