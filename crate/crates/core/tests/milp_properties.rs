use nexus_core::milp::{
    solve_lp, solve_milp, write_mps, MilpProblem, RowSense, SolveStatus, SolverOptions, VarId,
};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Spec {
    binaries: usize,
    continuous: usize,
    costs: Vec<i32>,
    rows: Vec<(Vec<i32>, u8, i32)>,
}

fn spec() -> impl Strategy<Value = Spec> {
    (1usize..=6, 0usize..=3).prop_flat_map(|(binaries, continuous)| {
        let n = binaries + continuous;
        (
            prop::collection::vec(-10i32..=10, n),
            prop::collection::vec((prop::collection::vec(-6i32..=6, n), 0u8..3, -8i32..=12), 1..=5),
        )
            .prop_map(move |(costs, rows)| Spec {
                binaries,
                continuous,
                costs,
                rows,
            })
    })
}

fn build(spec: &Spec, extra_rows: usize) -> MilpProblem {
    let mut p = MilpProblem::new("prop");
    let mut vars: Vec<VarId> = Vec::new();
    for j in 0..spec.binaries {
        vars.push(p.add_binary(format!("b{j}")).unwrap());
    }
    for j in 0..spec.continuous {
        vars.push(p.add_continuous(format!("y{j}"), 0.0, 5.0).unwrap());
    }
    for (v, &c) in vars.iter().zip(&spec.costs) {
        p.add_objective(*v, f64::from(c)).unwrap();
    }
    for (i, (coefs, sense, rhs)) in spec.rows.iter().take(extra_rows).enumerate() {
        let sense = match sense {
            0 => RowSense::Le,
            1 => RowSense::Ge,
            _ => RowSense::Eq,
        };
        let terms = vars.iter().zip(coefs).map(|(v, &a)| (*v, f64::from(a) / 2.0));
        p.add_constraint(format!("r{i}"), terms, sense, f64::from(*rhs) / 2.0).unwrap();
    }
    p
}

fn options() -> SolverOptions {
    SolverOptions::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn integer_optimum_is_above_relaxation(s in spec()) {
        let p = build(&s, s.rows.len());
        let milp = solve_milp(&p, &options());
        let lp = solve_lp(&p, &options());
        if milp.status == SolveStatus::Optimal {
            prop_assert_eq!(lp.status, SolveStatus::Optimal);
            prop_assert!(milp.objective.unwrap() >= lp.objective.unwrap() - 1e-9);
            prop_assert!(p.max_violation(&milp.assignment) < 1e-6);
            prop_assert!(p.max_integrality_gap(&milp.assignment) <= 1e-6);
        }
        if lp.status == SolveStatus::Infeasible {
            prop_assert_eq!(milp.status, SolveStatus::Infeasible);
        }
    }

    #[test]
    fn extra_row_never_lowers_the_optimum(s in spec()) {
        let k = s.rows.len();
        let fewer = solve_milp(&build(&s, k - 1), &options());
        let more = solve_milp(&build(&s, k), &options());
        if let (Some(a), Some(b)) = (fewer.objective, more.objective) {
            prop_assert!(b >= a - 1e-9, "{} < {}", b, a);
        }
        if fewer.status == SolveStatus::Infeasible {
            prop_assert_eq!(more.status, SolveStatus::Infeasible);
        }
    }

    #[test]
    fn repeated_solves_are_identical(s in spec()) {
        let p = build(&s, s.rows.len());
        prop_assert_eq!(solve_milp(&p, &options()), solve_milp(&p, &options()));
        prop_assert_eq!(write_mps(&p), write_mps(&p));
    }

    #[test]
    fn mps_declares_every_row_and_column(s in spec()) {
        let p = build(&s, s.rows.len());
        let mps = write_mps(&p);
        let rows = mps.lines().skip_while(|l| *l != "ROWS").skip(1).take_while(|l| *l != "COLUMNS").count();
        prop_assert_eq!(rows, p.num_constraints() + 1);
        for j in 1..=p.num_vars() {
            let col = format!("C{j:07}");
            prop_assert!(mps.lines().any(|l| l.trim_start().starts_with(&col)));
        }
        prop_assert!(mps.ends_with("ENDATA\n"));
    }
}
