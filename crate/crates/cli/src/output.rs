//! CSV rendering and atomic file writes.

use std::io::Write;
use std::path::Path;

use nexus_core::planner::{PlanOutcome, SweepGrid};

use crate::CliError;

/// Value rounded to 12 significant digits, printed in its shortest form;
/// exponent notation outside `[1e-5, 1e12)` as with `%g`.
pub fn format_number(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    // avoid "-0"
    if rounded == 0.0 {
        return "0".to_string();
    }
    let exponent = rounded.abs().log10().floor();
    if (-5.0..12.0).contains(&exponent) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

fn to_csv(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub const RUN_HEADER: [&str; 10] = [
    "scenario",
    "status",
    "cost",
    "weight_nu1",
    "weight_nu2",
    "weight_nu3",
    "weight_nu4",
    "defuzzified_weight",
    "normalized_weight",
    "balance_residual",
];

/// One row per scenario and an `expected_total_cost` footer row.
pub fn run_csv(outcome: &PlanOutcome) -> String {
    let mut rows: Vec<Vec<String>> = outcome
        .scenarios
        .iter()
        .map(|s| {
            let [a, b, c, d] = s.weight.points();
            vec![
                s.name.clone(),
                s.status.code().to_string(),
                opt(s.cost),
                format_number(a),
                format_number(b),
                format_number(c),
                format_number(d),
                format_number(s.crisp_weight),
                format_number(s.normalized_weight),
                opt(s.balance_residual),
            ]
        })
        .collect();
    let mut footer = vec![String::new(); RUN_HEADER.len()];
    footer[0] = "expected_total_cost".to_string();
    footer[1] = outcome.status().code().to_string();
    footer[2] = opt(outcome.expected_cost);
    rows.push(footer);
    to_csv(&RUN_HEADER, rows)
}

pub const SWEEP_HEADER: [&str; 4] = ["alpha", "gamma", "expected_cost", "status"];

/// Status recorded for a deterministic baseline row that solved.
pub const BASELINE_STATUS: &str = "deterministic";

/// Long-form grid: one row per cell, then one baseline row per alpha with an
/// empty gamma.
pub fn sweep_csv(grid: &SweepGrid) -> String {
    let status = |outcome: &Result<PlanOutcome, _>| match outcome {
        Ok(o) => o.status().code().to_string(),
        Err(_) => "error".to_string(),
    };
    let mut rows: Vec<Vec<String>> = grid
        .cells
        .iter()
        .map(|c| {
            vec![
                format_number(c.alpha.value()),
                format_number(c.gamma.value()),
                opt(c.expected_cost()),
                status(&c.outcome),
            ]
        })
        .collect();
    for b in &grid.baseline {
        let cost = b.outcome.as_ref().ok().and_then(|o| o.expected_cost);
        let code = if cost.is_some() {
            BASELINE_STATUS.to_string()
        } else {
            status(&b.outcome)
        };
        rows.push(vec![format_number(b.alpha.value()), String::new(), opt(cost), code]);
    }
    to_csv(&SWEEP_HEADER, rows)
}

/// Writes `contents` to a temporary file beside `path`, then renames it into
/// place so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
