//! Adapter for an external solver that reads MPS.
//!
//! The program is invoked as `<program> <model.mps> <solution.txt>` and must
//! exit successfully after writing a plain-text solution file:
//!
//! ```text
//! status optimal
//! objective 160
//! C0000001 8
//! C0000002 1
//! ```
//!
//! `status` is one of `optimal`, `infeasible`, `unbounded`, `iteration_limit`.
//! Column names are the ones emitted by [`write_mps`](super::write_mps);
//! columns not listed are taken as zero. Blank lines and `#` comments are
//! ignored.

use std::path::PathBuf;
use std::process::Command;

use super::{write_mps, MilpProblem, MilpSolver, SolveResult, SolveStatus, SolverError};

#[derive(Debug, Clone)]
pub struct ExternalSolver {
    pub program: PathBuf,
}

impl ExternalSolver {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        Self {
            program: program.into(),
        }
    }
}

impl MilpSolver for ExternalSolver {
    fn solve(&self, problem: &MilpProblem) -> Result<SolveResult, SolverError> {
        let dir = tempfile::tempdir()?;
        let model = dir.path().join("model.mps");
        let solution = dir.path().join("solution.txt");
        std::fs::write(&model, write_mps(problem))?;
        let status = Command::new(&self.program)
            .arg(&model)
            .arg(&solution)
            .status()?;
        if !status.success() {
            return Err(SolverError::ExternalExit(status));
        }
        let text = std::fs::read_to_string(&solution)?;
        parse_solution(problem, &text)
    }
}

pub(crate) fn parse_solution(problem: &MilpProblem, text: &str) -> Result<SolveResult, SolverError> {
    let bad = |lineno: usize, msg: &str| SolverError::SolutionFormat(format!("line {lineno}: {msg}"));
    let mut status = None;
    let mut objective = None;
    let mut x = vec![0.0; problem.num_vars()];
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap_or_default();
        let value = parts.next().ok_or_else(|| bad(lineno, "missing value"))?;
        if parts.next().is_some() {
            return Err(bad(lineno, "trailing fields"));
        }
        match key {
            "status" => {
                status = Some(match value {
                    "optimal" => SolveStatus::Optimal,
                    "infeasible" => SolveStatus::Infeasible,
                    "unbounded" => SolveStatus::Unbounded,
                    "iteration_limit" => SolveStatus::IterationLimit,
                    other => return Err(bad(lineno, &format!("unknown status '{other}'"))),
                })
            }
            "objective" => {
                objective = Some(value.parse::<f64>().map_err(|e| bad(lineno, &e.to_string()))?)
            }
            col => {
                let index = col
                    .strip_prefix('C')
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|&n| n >= 1 && n <= x.len())
                    .ok_or_else(|| bad(lineno, &format!("unknown column '{col}'")))?;
                x[index - 1] = value.parse().map_err(|e: std::num::ParseFloatError| bad(lineno, &e.to_string()))?;
            }
        }
    }
    let status = status.ok_or_else(|| bad(0, "no status line"))?;
    if status != SolveStatus::Optimal {
        return Ok(SolveResult::without_solution(status, 0, 0));
    }
    let objective = objective.unwrap_or_else(|| problem.evaluate_objective(&x));
    Ok(SolveResult {
        status,
        objective: Some(objective),
        assignment: x,
        pivots: 0,
        nodes: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::RowSense;

    fn problem() -> MilpProblem {
        let mut p = MilpProblem::new("ext");
        let x = p.add_continuous("x", 0.0, 10.0).unwrap();
        let u = p.add_binary("u").unwrap();
        p.add_objective(x, 20.0).unwrap();
        p.add_constraint("d", [(x, 1.0), (u, 0.0)], RowSense::Ge, 8.0).unwrap();
        p
    }

    #[test]
    fn parses_solution_file() {
        let p = problem();
        let r = parse_solution(&p, "status optimal\nobjective 160\n# c\nC0000001 8\n\n").unwrap();
        assert_eq!(r.objective, Some(160.0));
        assert_eq!(r.assignment, vec![8.0, 0.0]);
        let r = parse_solution(&p, "status infeasible\n").unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(r.assignment.is_empty());
    }

    #[test]
    fn rejects_malformed_solution() {
        let p = problem();
        assert!(parse_solution(&p, "objective 1\n").is_err());
        assert!(parse_solution(&p, "status optimal\nC0000009 1\n").is_err());
        assert!(parse_solution(&p, "status maybe\n").is_err());
        assert!(parse_solution(&p, "status optimal\nC0000001 abc\n").is_err());
    }

    #[cfg(unix)]
    #[test]
    fn runs_external_program() {
        use std::os::unix::fs::PermissionsExt;
        let dir = tempfile::tempdir().unwrap();
        let script = dir.path().join("fake-solver.sh");
        std::fs::write(
            &script,
            "#!/bin/sh\ngrep -q '^ROWS' \"$1\" || exit 4\nprintf 'status optimal\\nobjective 160\\nC0000001 8\\n' > \"$2\"\n",
        )
        .unwrap();
        std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
        let r = ExternalSolver::new(&script).solve(&problem()).unwrap();
        assert_eq!(r.objective, Some(160.0));
        assert_eq!(r.assignment[0], 8.0);

        let failing = dir.path().join("fail.sh");
        std::fs::write(&failing, "#!/bin/sh\nexit 3\n").unwrap();
        std::fs::set_permissions(&failing, std::fs::Permissions::from_mode(0o755)).unwrap();
        assert!(matches!(
            ExternalSolver::new(&failing).solve(&problem()),
            Err(SolverError::ExternalExit(_))
        ));
    }
}
