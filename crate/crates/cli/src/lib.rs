//! Batch front end for the nexus planner.
//!
//! Exit codes: 0 success, 1 domain failure (violations, infeasible
//! scenarios), 2 input or I/O error, 3 solver resource limit.

pub mod input;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use thiserror::Error;

use nexus_core::fuzzy::{ConfidenceLevel, MeasureKind};
use nexus_core::milp::{EmbeddedSolver, ExternalSolver, MilpSolver, SolveStatus, SolverOptions};
use nexus_core::nexus::{validate_profile, validate_scenario, NexusError, Scenario, SystemProfile, Violation};
use nexus_core::planner::{expected_total_cost, sweep, PlanError, PlanRequest};
use nexus_core::robust::RobustBudget;

/// Default sweep grid.
pub const DEFAULT_ALPHAS: [f64; 2] = [0.0, 0.5];
pub const DEFAULT_GAMMAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{} violation(s)", .0.len())]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("scenario '{scenario}' did not solve: {status}")]
    ScenarioFailed { scenario: String, status: SolveStatus },
    #[error("no sweep cell produced a cost")]
    SweepFailed { resource_limit: bool },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Invalid(_) => 1,
            CliError::Plan(PlanError::Solver { .. }) => 2,
            CliError::Plan(_) => 1,
            CliError::ScenarioFailed { status, .. } => {
                if *status == SolveStatus::IterationLimit {
                    3
                } else {
                    1
                }
            }
            CliError::SweepFailed { resource_limit } => {
                if *resource_limit {
                    3
                } else {
                    1
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub profile: PathBuf,
    pub scenarios: PathBuf,
    pub alphas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub measure: MeasureKind,
    /// CSV destination; `None` prints the CSV to standard output.
    pub out: Option<PathBuf>,
    pub solver: SolverOptions,
    pub external_solver: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(profile: impl Into<PathBuf>, scenarios: impl Into<PathBuf>) -> Self {
        Self {
            profile: profile.into(),
            scenarios: scenarios.into(),
            alphas: Vec::new(),
            gammas: Vec::new(),
            measure: MeasureKind::Credibility,
            out: None,
            solver: SolverOptions::default(),
            external_solver: None,
        }
    }

    fn alphas(&self) -> Result<Vec<ConfidenceLevel>, CliError> {
        self.alphas
            .iter()
            .map(|&a| {
                ConfidenceLevel::new(a).map_err(|_| CliError::Usage(format!("alpha {a} is outside [0, 1]")))
            })
            .collect()
    }

    fn gammas(&self) -> Result<Vec<RobustBudget>, CliError> {
        self.gammas
            .iter()
            .map(|&g| RobustBudget::new(g).map_err(|_| CliError::Usage(format!("gamma {g} is outside [0, 1]"))))
            .collect()
    }

    fn solver(&self) -> Box<dyn MilpSolver> {
        match &self.external_solver {
            Some(program) => Box::new(ExternalSolver::new(program)),
            None => Box::new(EmbeddedSolver::new(self.solver)),
        }
    }
}

struct Inputs {
    profile: SystemProfile,
    scenarios: Vec<Scenario>,
}

fn load(config: &RunConfig) -> Result<Inputs, CliError> {
    Ok(Inputs {
        profile: input::load_profile(&config.profile)?,
        scenarios: input::load_scenarios(&config.scenarios)?,
    })
}

fn violations(inputs: &Inputs) -> Vec<Violation> {
    let mut out = validate_profile(&inputs.profile);
    if inputs.scenarios.is_empty() {
        out.push(Violation {
            field: "scenarios".into(),
            message: "at least one scenario is required".into(),
        });
    }
    for (i, s) in inputs.scenarios.iter().enumerate() {
        out.extend(validate_scenario(&inputs.profile, s, i));
    }
    out
}

fn load_valid(config: &RunConfig) -> Result<Inputs, CliError> {
    let inputs = load(config)?;
    let v = violations(&inputs);
    if v.is_empty() {
        Ok(inputs)
    } else {
        Err(CliError::Invalid(v))
    }
}

fn emit(config: &RunConfig, csv: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    let console = |source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    match &config.out {
        Some(path) => output::write_atomic(path, csv),
        None => stdout.write_all(csv.as_bytes()).map_err(console),
    }
}

fn say(stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    writeln!(stdout, "{text}").map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

/// Prints one violation per line; succeeds only when there are none.
pub fn cmd_validate(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let inputs = load(config)?;
    let v = violations(&inputs);
    for violation in &v {
        say(stdout, &violation.to_string())?;
    }
    if v.is_empty() {
        say(
            stdout,
            &format!(
                "ok: {} periods, {} scenario(s)",
                inputs.profile.horizon,
                inputs.scenarios.len()
            ),
        )?;
        Ok(())
    } else {
        Err(CliError::Invalid(v))
    }
}

/// Solves every scenario at one `(alpha, gamma)` and writes the audit CSV.
pub fn cmd_run(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (alpha, gamma) = match (config.alphas()?.as_slice(), config.gammas()?.as_slice()) {
        ([a], [g]) => (*a, *g),
        _ => return Err(CliError::Usage("run takes exactly one --alpha and one --gamma".into())),
    };
    let inputs = load_valid(config)?;
    let solver = config.solver();
    let request = PlanRequest {
        profile: &inputs.profile,
        scenarios: &inputs.scenarios,
        alpha,
        gamma,
        measure: config.measure,
    };
    let outcome = expected_total_cost(&request, solver.as_ref())?;
    let csv = output::run_csv(&outcome);
    emit(config, &csv, stdout)?;
    if config.out.is_some() {
        for s in &outcome.scenarios {
            say(
                stdout,
                &format!(
                    "{:<16} {:<16} weight {:>8}  cost {}",
                    s.name,
                    s.status.code(),
                    output::format_number(s.normalized_weight),
                    s.cost.map(output::format_number).unwrap_or_else(|| "-".into())
                ),
            )?;
        }
    }
    if let Some(f) = outcome.failure() {
        return Err(CliError::ScenarioFailed {
            scenario: f.name.clone(),
            status: f.status,
        });
    }
    if config.out.is_some() {
        say(
            stdout,
            &format!(
                "expected total cost: {}",
                outcome.expected_cost.map(output::format_number).unwrap_or_default()
            ),
        )?;
    }
    Ok(())
}

/// Evaluates the `(alpha, gamma)` grid plus deterministic baseline rows.
pub fn cmd_sweep(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut alphas = config.alphas()?;
    let mut gammas = config.gammas()?;
    if alphas.is_empty() {
        alphas = DEFAULT_ALPHAS.iter().map(|&a| ConfidenceLevel::new(a).expect("in range")).collect();
    }
    if gammas.is_empty() {
        gammas = DEFAULT_GAMMAS.iter().map(|&g| RobustBudget::new(g).expect("in range")).collect();
    }
    let inputs = load_valid(config)?;
    let solver = config.solver();
    let grid = sweep(
        &inputs.profile,
        &inputs.scenarios,
        &alphas,
        &gammas,
        config.measure,
        solver.as_ref(),
    );
    emit(config, &output::sweep_csv(&grid), stdout)?;
    let solved = grid.cells.iter().filter(|c| c.expected_cost().is_some()).count();
    if config.out.is_some() {
        say(stdout, &format!("{solved} of {} cells solved", grid.cells.len()))?;
    }
    if solved > 0 {
        return Ok(());
    }
    let resource_limit = grid.cells.iter().all(|c| match &c.outcome {
        Ok(o) => o.status() == SolveStatus::IterationLimit,
        Err(_) => false,
    });
    Err(CliError::SweepFailed { resource_limit })
}

/// Human-readable lines for an error, most specific last.
pub fn describe(err: &CliError) -> Vec<String> {
    let mut lines = vec![format!("error: {err}")];
    match err {
        CliError::Invalid(v) => lines.extend(v.iter().map(ToString::to_string)),
        CliError::Plan(PlanError::Model {
            source: NexusError::Invalid(v),
            ..
        }) => lines.extend(v.iter().map(ToString::to_string)),
        _ => {}
    }
    lines
}
