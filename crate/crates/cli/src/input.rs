//! Profile and scenario files.
//!
//! Both are JSON documents. A demand series is either an inline array or a
//! reference `{"csv": "file.csv", "column": "name"}` to a side-car CSV with a
//! header row; relative paths resolve against the scenario file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;

use nexus_core::fuzzy::TrapezoidalFuzzyNumber;
use nexus_core::nexus::{Scenario, SystemProfile};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SeriesSpec {
    Inline(Vec<f64>),
    Csv { csv: PathBuf, column: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSpec {
    name: String,
    weight: TrapezoidalFuzzyNumber,
    power_demand: SeriesSpec,
    water_demand: SeriesSpec,
    #[serde(default)]
    availability: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    scenarios: Vec<ScenarioSpec>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn load_profile(path: &Path) -> Result<SystemProfile, CliError> {
    parse_json(path)
}

pub fn load_scenarios(path: &Path) -> Result<Vec<Scenario>, CliError> {
    let file: ScenarioFile = parse_json(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    file.scenarios
        .into_iter()
        .map(|s| {
            Ok(Scenario {
                power_demand: resolve(base, s.power_demand)?,
                water_demand: resolve(base, s.water_demand)?,
                name: s.name,
                weight: s.weight,
                availability: s.availability,
            })
        })
        .collect()
}

fn resolve(base: &Path, spec: SeriesSpec) -> Result<Vec<f64>, CliError> {
    match spec {
        SeriesSpec::Inline(v) => Ok(v),
        SeriesSpec::Csv { csv, column } => read_column(&base.join(csv), &column),
    }
}

fn read_column(path: &Path, column: &str) -> Result<Vec<f64>, CliError> {
    let parse_err = |message: String| CliError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let text = read(path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(e.to_string()))?.clone();
    let col = headers
        .iter()
        .position(|h| h.trim() == column)
        .ok_or_else(|| parse_err(format!("no column named '{column}'")))?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = record.get(col).unwrap_or("").trim();
        let v = cell
            .parse::<f64>()
            .map_err(|e| parse_err(format!("line {line}, column '{column}': '{cell}': {e}")))?;
        out.push(v);
    }
    Ok(out)
}
