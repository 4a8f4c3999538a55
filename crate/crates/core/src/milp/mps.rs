//! Fixed-format MPS writer.
//!
//! Names in fixed MPS are limited to eight characters, so rows and columns are
//! written as `R0000001` / `C0000001` (one-based) and the model's own names are
//! listed in leading `*` comment lines.

use std::fmt::Write;

use super::{MilpProblem, RowSense, VarId, VarKind};

const OBJECTIVE_ROW: &str = "COST";

pub fn column_name(var: VarId) -> String {
    format!("C{:07}", var.index() + 1)
}

pub fn row_name(row: usize) -> String {
    format!("R{:07}", row + 1)
}

/// Shortest decimal rendering of `v` that fits the 12-character value field.
fn number(v: f64) -> String {
    let plain = format!("{v}");
    if plain.len() <= 12 {
        return plain;
    }
    (0..=16)
        .rev()
        .map(|p| format!("{v:.p$e}"))
        .find(|s| s.len() <= 12)
        .unwrap_or_else(|| format!("{v:e}"))
}

fn line(out: &mut String, fields: [&str; 6]) {
    let [f1, f2, f3, f4, f5, f6] = fields;
    let text = format!(" {f1:<2} {f2:<8}  {f3:<8}  {f4:>12}   {f5:<8}  {f6:>12}");
    let _ = writeln!(out, "{}", text.trim_end());
}

/// Renders `problem` as a fixed-format MPS document (minimization).
pub fn write_mps(problem: &MilpProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "* problem: {}", problem.name());
    for id in problem.var_ids() {
        let _ = writeln!(out, "* {} {}", column_name(id), problem.variable(id).name);
    }
    for (i, c) in problem.constraints().iter().enumerate() {
        let _ = writeln!(out, "* {} {}", row_name(i), c.label);
    }
    let name: String = problem
        .name()
        .chars()
        .filter(|c| !c.is_whitespace())
        .take(8)
        .collect();
    let _ = writeln!(out, "NAME          {}", if name.is_empty() { "MODEL" } else { &name });

    let _ = writeln!(out, "ROWS");
    line(&mut out, ["N", OBJECTIVE_ROW, "", "", "", ""]);
    for (i, c) in problem.constraints().iter().enumerate() {
        let kind = match c.sense {
            RowSense::Le => "L",
            RowSense::Ge => "G",
            RowSense::Eq => "E",
        };
        line(&mut out, [kind, &row_name(i), "", "", "", ""]);
    }

    // Column-major view of the constraint matrix.
    let mut entries: Vec<Vec<(String, f64)>> = vec![Vec::new(); problem.num_vars()];
    for id in problem.var_ids() {
        let c = problem.objective_coefficient(id);
        if c != 0.0 {
            entries[id.index()].push((OBJECTIVE_ROW.to_string(), c));
        }
    }
    for (i, con) in problem.constraints().iter().enumerate() {
        for &(var, a) in &con.terms {
            entries[var.index()].push((row_name(i), a));
        }
    }

    let _ = writeln!(out, "COLUMNS");
    let mut in_integer_block = false;
    for id in problem.var_ids() {
        let is_int = problem.variable(id).kind == VarKind::Binary;
        if is_int != in_integer_block {
            let marker = if is_int { "'INTORG'" } else { "'INTEND'" };
            line(&mut out, ["", "MARKER", "'MARKER'", "", marker, ""]);
            in_integer_block = is_int;
        }
        let col = column_name(id);
        let column = &entries[id.index()];
        if column.is_empty() {
            // keep the column declared even if it appears nowhere
            line(&mut out, ["", &col, OBJECTIVE_ROW, "0", "", ""]);
        }
        for pair in column.chunks(2) {
            let (r1, v1) = &pair[0];
            match pair.get(1) {
                Some((r2, v2)) => line(&mut out, ["", &col, r1, &number(*v1), r2, &number(*v2)]),
                None => line(&mut out, ["", &col, r1, &number(*v1), "", ""]),
            }
        }
    }
    if in_integer_block {
        line(&mut out, ["", "MARKER", "'MARKER'", "", "'INTEND'", ""]);
    }

    let _ = writeln!(out, "RHS");
    for (i, con) in problem.constraints().iter().enumerate() {
        if con.rhs != 0.0 {
            line(&mut out, ["", "RHS", &row_name(i), &number(con.rhs), "", ""]);
        }
    }

    let _ = writeln!(out, "BOUNDS");
    for id in problem.var_ids() {
        let v = problem.variable(id);
        let col = column_name(id);
        let mut bound = |kind: &str, value: Option<f64>| {
            let val = value.map(number).unwrap_or_default();
            line(&mut out, [kind, "BND", &col, &val, "", ""]);
        };
        match (v.lower.is_finite(), v.upper.is_finite()) {
            _ if v.lower == v.upper => bound("FX", Some(v.lower)),
            (false, false) => bound("FR", None),
            (false, true) => {
                bound("MI", None);
                bound("UP", Some(v.upper));
            }
            (true, upper_finite) => {
                if v.lower != 0.0 {
                    bound("LO", Some(v.lower));
                }
                if upper_finite {
                    bound("UP", Some(v.upper));
                }
            }
        }
    }
    let _ = writeln!(out, "ENDATA");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::MilpProblem;

    fn sample() -> MilpProblem {
        let mut p = MilpProblem::new("demo");
        let x = p.add_continuous("x", 0.0, 4.0).unwrap();
        let y = p.add_binary("y").unwrap();
        let z = p.add_continuous("z", f64::NEG_INFINITY, f64::INFINITY).unwrap();
        p.add_objective(x, 1.5).unwrap();
        p.add_objective(y, -2.0).unwrap();
        p.add_constraint("cap", [(x, 1.0), (y, -4.0)], RowSense::Le, 0.0).unwrap();
        p.add_constraint("dem", [(x, 1.0), (z, 1.0)], RowSense::Ge, 1.0 / 3.0).unwrap();
        p.add_constraint("bal", [(z, 2.0)], RowSense::Eq, 1.0).unwrap();
        p
    }

    #[test]
    fn sections_and_fields() {
        let mps = write_mps(&sample());
        let expected = "\
NAME          demo
ROWS
 N  COST
 L  R0000001
 G  R0000002
 E  R0000003
COLUMNS
    C0000001  COST               1.5   R0000001             1
    C0000001  R0000002             1
    MARKER    'MARKER'                 'INTORG'
    C0000002  COST                -2   R0000001            -4
    MARKER    'MARKER'                 'INTEND'
    C0000003  R0000002             1   R0000003             2
RHS
    RHS       R0000002  3.3333333e-1
    RHS       R0000003             1
BOUNDS
 UP BND       C0000001             4
 UP BND       C0000002             1
 FR BND       C0000003
ENDATA
";
        let body = mps.split_once("NAME").map(|(_, b)| format!("NAME{b}")).unwrap();
        assert_eq!(body, expected);
    }

    #[test]
    fn long_numbers_fit_field() {
        for v in [1.0 / 3.0, -123456.789012345, 1e-300, 6.02e23, -0.1] {
            let s = number(v);
            assert!(s.len() <= 12, "{s}");
            let back: f64 = s.parse().unwrap();
            assert!((back - v).abs() <= 1e-6 * v.abs());
        }
    }

    #[test]
    fn names_listed_in_comments() {
        let mps = write_mps(&sample());
        assert!(mps.contains("* C0000001 x\n"));
        assert!(mps.contains("* R0000002 dem\n"));
    }
}
