//! Scenario solves, weight normalisation, expected total cost and sweeps.
//!
//! Each scenario's MILP is built at the requested confidence level, made
//! robust at the requested budget and solved; crisp scenario weights are the
//! alpha-optimistic defuzzified fuzzy weights, normalised to sum to one.

use rayon::prelude::*;
use thiserror::Error;

use crate::fuzzy::{defuzzify, ConfidenceLevel, MeasureKind, TrapezoidalFuzzyNumber};
use crate::milp::{MilpSolver, SolveResult, SolveStatus, SolverError};
use crate::nexus::{build_model, deterministic_model, NexusError, NexusModel, Scenario, SystemProfile};
use crate::robust::{robustify, RobustBudget, RobustError};

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("no scenarios given")]
    NoScenarios,
    #[error("defuzzified scenario weights sum to {0}; cannot normalise")]
    DegenerateWeights(f64),
    #[error("scenario '{scenario}': {source}")]
    Model {
        scenario: String,
        #[source]
        source: NexusError,
    },
    #[error("scenario '{scenario}': {source}")]
    Robust {
        scenario: String,
        #[source]
        source: RobustError,
    },
    #[error("scenario '{scenario}': {source}")]
    Solver {
        scenario: String,
        #[source]
        source: SolverError,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct PlanRequest<'a> {
    pub profile: &'a SystemProfile,
    pub scenarios: &'a [Scenario],
    pub alpha: ConfidenceLevel,
    pub gamma: RobustBudget,
    pub measure: MeasureKind,
}

/// Solved scenario: cost and the largest balance-row residual, re-checked on
/// the returned point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSolve {
    pub cost: Option<f64>,
    pub balance_residual: Option<f64>,
    pub result: SolveResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub name: String,
    pub status: SolveStatus,
    pub cost: Option<f64>,
    pub weight: TrapezoidalFuzzyNumber,
    pub crisp_weight: f64,
    pub normalized_weight: f64,
    pub balance_residual: Option<f64>,
    pub pivots: usize,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutcome {
    pub scenarios: Vec<ScenarioOutcome>,
    /// Present iff every scenario solved to optimality.
    pub expected_cost: Option<f64>,
}

impl PlanOutcome {
    /// First scenario that did not solve to optimality.
    pub fn failure(&self) -> Option<&ScenarioOutcome> {
        self.scenarios.iter().find(|s| s.status != SolveStatus::Optimal)
    }

    pub fn status(&self) -> SolveStatus {
        self.failure().map_or(SolveStatus::Optimal, |s| s.status)
    }
}

fn solve_built(
    model: NexusModel,
    gamma: RobustBudget,
    scenario: &Scenario,
    solver: &dyn MilpSolver,
) -> Result<ScenarioSolve, PlanError> {
    let problem = if model.uncertain.is_empty() || gamma.value() == 0.0 {
        model.problem
    } else {
        robustify(&model.problem, &model.uncertain, gamma).map_err(|source| PlanError::Robust {
            scenario: scenario.name.clone(),
            source,
        })?
    };
    let result = solver.solve(&problem).map_err(|source| PlanError::Solver {
        scenario: scenario.name.clone(),
        source,
    })?;
    let balance_residual = result.is_optimal().then(|| {
        let idx = &model.index;
        idx.power_balance
            .iter()
            .chain(&idx.water_balance)
            .chain(&idx.wastewater_balance)
            .filter_map(|&row| problem.constraint(row))
            .map(|c| (c.activity(&result.assignment) - c.rhs).abs())
            .fold(0.0, f64::max)
    });
    Ok(ScenarioSolve {
        cost: result.objective,
        balance_residual,
        result,
    })
}

/// Robust optimum of one scenario at `(alpha, gamma)`; non-optimal statuses
/// are returned as-is.
pub fn solve_scenario(
    profile: &SystemProfile,
    scenario: &Scenario,
    alpha: ConfidenceLevel,
    gamma: RobustBudget,
    measure: MeasureKind,
    solver: &dyn MilpSolver,
) -> Result<ScenarioSolve, PlanError> {
    let model = build_model(profile, scenario, alpha, measure).map_err(|source| PlanError::Model {
        scenario: scenario.name.clone(),
        source,
    })?;
    solve_built(model, gamma, scenario, solver)
}

/// Optimum of the deterministic model of one scenario.
pub fn solve_deterministic(
    profile: &SystemProfile,
    scenario: &Scenario,
    solver: &dyn MilpSolver,
) -> Result<ScenarioSolve, PlanError> {
    let model = deterministic_model(profile, scenario).map_err(|source| PlanError::Model {
        scenario: scenario.name.clone(),
        source,
    })?;
    solve_built(model, RobustBudget::new(0.0).expect("zero budget"), scenario, solver)
}

/// Defuzzified weights divided by their sum.
pub fn normalize_weights(
    weights: &[TrapezoidalFuzzyNumber],
    alpha: ConfidenceLevel,
    measure: MeasureKind,
) -> Result<Vec<f64>, PlanError> {
    Ok(crisp_and_normalized(weights, alpha, measure)?.1)
}

fn crisp_and_normalized(
    weights: &[TrapezoidalFuzzyNumber],
    alpha: ConfidenceLevel,
    measure: MeasureKind,
) -> Result<(Vec<f64>, Vec<f64>), PlanError> {
    if weights.is_empty() {
        return Err(PlanError::NoScenarios);
    }
    let crisp: Vec<f64> = weights.iter().map(|w| defuzzify(w, alpha, measure)).collect();
    let total: f64 = crisp.iter().sum();
    if !(total > 0.0) || crisp.iter().any(|&w| w < 0.0) {
        return Err(PlanError::DegenerateWeights(total));
    }
    let normalized = crisp.iter().map(|w| w / total).collect();
    Ok((crisp, normalized))
}

fn compose(
    scenarios: &[Scenario],
    solves: Vec<ScenarioSolve>,
    crisp: Vec<f64>,
    normalized: Vec<f64>,
) -> PlanOutcome {
    let outcomes: Vec<ScenarioOutcome> = scenarios
        .iter()
        .zip(solves)
        .zip(crisp.into_iter().zip(normalized))
        .map(|((s, solve), (crisp_weight, normalized_weight))| ScenarioOutcome {
            name: s.name.clone(),
            status: solve.result.status,
            cost: solve.cost,
            weight: s.weight,
            crisp_weight,
            normalized_weight,
            balance_residual: solve.balance_residual,
            pivots: solve.result.pivots,
            nodes: solve.result.nodes,
        })
        .collect();
    let expected_cost = outcomes
        .iter()
        .map(|o| o.cost.map(|c| o.normalized_weight * c))
        .sum::<Option<f64>>();
    PlanOutcome {
        scenarios: outcomes,
        expected_cost,
    }
}

/// Solves every scenario (concurrently) and forms the weighted expected cost.
pub fn expected_total_cost(
    request: &PlanRequest<'_>,
    solver: &dyn MilpSolver,
) -> Result<PlanOutcome, PlanError> {
    let weights: Vec<_> = request.scenarios.iter().map(|s| s.weight).collect();
    let (crisp, normalized) = crisp_and_normalized(&weights, request.alpha, request.measure)?;
    let solves = request
        .scenarios
        .par_iter()
        .map(|s| {
            solve_scenario(
                request.profile,
                s,
                request.alpha,
                request.gamma,
                request.measure,
                solver,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(compose(request.scenarios, solves, crisp, normalized))
}

/// Expected cost of the deterministic models, weighted as at `alpha`.
pub fn deterministic_expected_cost(
    profile: &SystemProfile,
    scenarios: &[Scenario],
    alpha: ConfidenceLevel,
    measure: MeasureKind,
    solver: &dyn MilpSolver,
) -> Result<PlanOutcome, PlanError> {
    let weights: Vec<_> = scenarios.iter().map(|s| s.weight).collect();
    let (crisp, normalized) = crisp_and_normalized(&weights, alpha, measure)?;
    let solves = scenarios
        .par_iter()
        .map(|s| solve_deterministic(profile, s, solver))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(compose(scenarios, solves, crisp, normalized))
}

#[derive(Debug)]
pub struct SweepCell {
    pub alpha: ConfidenceLevel,
    pub gamma: RobustBudget,
    pub outcome: Result<PlanOutcome, PlanError>,
}

impl SweepCell {
    pub fn expected_cost(&self) -> Option<f64> {
        self.outcome.as_ref().ok().and_then(|o| o.expected_cost)
    }
}

#[derive(Debug)]
pub struct BaselineCell {
    pub alpha: ConfidenceLevel,
    pub outcome: Result<PlanOutcome, PlanError>,
}

#[derive(Debug)]
pub struct SweepGrid {
    pub alphas: Vec<ConfidenceLevel>,
    pub gammas: Vec<RobustBudget>,
    /// Row-major: all gammas of the first alpha, then the next alpha.
    pub cells: Vec<SweepCell>,
    /// Deterministic expected cost, one per alpha.
    pub baseline: Vec<BaselineCell>,
}

impl SweepGrid {
    pub fn cell(&self, alpha_index: usize, gamma_index: usize) -> &SweepCell {
        &self.cells[alpha_index * self.gammas.len() + gamma_index]
    }
}

/// Evaluates every `(alpha, gamma)` cell plus a deterministic baseline per
/// alpha. Cell failures are kept in the cell.
pub fn sweep(
    profile: &SystemProfile,
    scenarios: &[Scenario],
    alphas: &[ConfidenceLevel],
    gammas: &[RobustBudget],
    measure: MeasureKind,
    solver: &dyn MilpSolver,
) -> SweepGrid {
    let grid: Vec<(ConfidenceLevel, RobustBudget)> = alphas
        .iter()
        .flat_map(|&a| gammas.iter().map(move |&g| (a, g)))
        .collect();
    let cells = grid
        .into_par_iter()
        .map(|(alpha, gamma)| {
            let request = PlanRequest {
                profile,
                scenarios,
                alpha,
                gamma,
                measure,
            };
            SweepCell {
                alpha,
                gamma,
                outcome: expected_total_cost(&request, solver),
            }
        })
        .collect();
    let baseline = alphas
        .par_iter()
        .map(|&alpha| BaselineCell {
            alpha,
            outcome: deterministic_expected_cost(profile, scenarios, alpha, measure, solver),
        })
        .collect();
    SweepGrid {
        alphas: alphas.to_vec(),
        gammas: gammas.to_vec(),
        cells,
        baseline,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::EmbeddedSolver;
    use crate::nexus::tests::small_profile;

    fn tfn(a: f64, b: f64, c: f64, d: f64) -> TrapezoidalFuzzyNumber {
        TrapezoidalFuzzyNumber::new(a, b, c, d).unwrap()
    }

    fn crisp(v: f64) -> TrapezoidalFuzzyNumber {
        TrapezoidalFuzzyNumber::crisp(v).unwrap()
    }

    fn alpha(a: f64) -> ConfidenceLevel {
        ConfidenceLevel::new(a).unwrap()
    }

    fn gamma(g: f64) -> RobustBudget {
        RobustBudget::new(g).unwrap()
    }

    fn scenario(name: &str, weight: TrapezoidalFuzzyNumber, power: f64) -> Scenario {
        Scenario {
            name: name.into(),
            weight,
            power_demand: vec![power, power + 2.0],
            water_demand: vec![1.0, 1.5],
            availability: Default::default(),
        }
    }

    fn ranged_profile() -> SystemProfile {
        let mut p = small_profile();
        p.transmission.loss_deviation = 0.03;
        p.generators[0].capacity_deviation = 2.0;
        p.water.purification_efficiency_deviation = 0.05;
        p
    }

    #[test]
    fn crisp_weights_divide_by_sum() {
        let w = normalize_weights(
            &[crisp(0.3), crisp(0.3), crisp(0.6)],
            alpha(0.7),
            MeasureKind::Credibility,
        )
        .unwrap();
        assert_eq!(w, vec![0.25, 0.25, 0.5]);
    }

    #[test]
    fn identical_fuzzy_weights_are_uniform() {
        let w = tfn(0.1, 0.2, 0.4, 0.5);
        let n = normalize_weights(&[w; 4], alpha(0.3), MeasureKind::Possibility).unwrap();
        assert!(n.iter().all(|&x| x == 0.25));
    }

    #[test]
    fn fuzzy_weights_at_half_confidence() {
        let n = normalize_weights(
            &[tfn(0.1, 0.2, 0.3, 0.4), tfn(0.2, 0.4, 0.6, 0.8)],
            alpha(0.5),
            MeasureKind::Credibility,
        )
        .unwrap();
        assert!((n[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((n[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_weights_are_an_error() {
        let r = normalize_weights(&[crisp(0.0), crisp(0.0)], alpha(0.5), MeasureKind::Credibility);
        assert!(matches!(r, Err(PlanError::DegenerateWeights(_))));
        assert!(matches!(
            normalize_weights(&[], alpha(0.5), MeasureKind::Credibility),
            Err(PlanError::NoScenarios)
        ));
    }

    #[test]
    fn inert_stages_match_deterministic() {
        let mut p = ranged_profile();
        p.batteries[0].discharge_efficiency = crate::nexus::FuzzyParameter::crisp(0.9).unwrap();
        p.water.purification_efficiency = crate::nexus::FuzzyParameter::crisp(0.9).unwrap();
        let s = scenario("s", crisp(1.0), 6.0);
        let solver = EmbeddedSolver::default();
        let robust =
            solve_scenario(&p, &s, alpha(0.0), gamma(0.0), MeasureKind::Credibility, &solver).unwrap();
        let det = solve_deterministic(&p, &s, &solver).unwrap();
        assert_eq!(robust.cost, det.cost);
        assert!(robust.balance_residual.unwrap() < 1e-6);
    }

    #[test]
    fn cost_nondecreasing_in_gamma() {
        let p = ranged_profile();
        let s = scenario("s", crisp(1.0), 9.0);
        let solver = EmbeddedSolver::default();
        let costs: Vec<f64> = [0.0, 0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|&g| {
                solve_scenario(&p, &s, alpha(0.5), gamma(g), MeasureKind::Credibility, &solver)
                    .unwrap()
                    .cost
                    .unwrap()
            })
            .collect();
        for w in costs.windows(2) {
            assert!(w[1] >= w[0] - 1e-7 * w[0].abs().max(1.0), "{costs:?}");
        }
        assert!(costs[4] > costs[0]);
    }

    #[test]
    fn infeasible_scenario_is_flagged() {
        let mut p = small_profile();
        p.penalties.unmet_power = None;
        let scenarios = [scenario("ok", crisp(1.0), 5.0), scenario("short", crisp(1.0), 40.0)];
        let request = PlanRequest {
            profile: &p,
            scenarios: &scenarios,
            alpha: alpha(0.5),
            gamma: gamma(0.0),
            measure: MeasureKind::Credibility,
        };
        let out = expected_total_cost(&request, &EmbeddedSolver::default()).unwrap();
        assert_eq!(out.expected_cost, None);
        assert_eq!(out.status(), SolveStatus::Infeasible);
        assert_eq!(out.failure().unwrap().name, "short");
        assert!(out.scenarios[0].cost.is_some());
    }

    #[test]
    fn expected_cost_is_weighted_sum() {
        let p = ranged_profile();
        let scenarios = [
            scenario("a", tfn(0.2, 0.3, 0.4, 0.5), 4.0),
            scenario("b", tfn(0.1, 0.1, 0.2, 0.6), 8.0),
            scenario("c", crisp(0.25), 11.0),
        ];
        let solver = EmbeddedSolver::default();
        let request = PlanRequest {
            profile: &p,
            scenarios: &scenarios,
            alpha: alpha(0.5),
            gamma: gamma(0.5),
            measure: MeasureKind::Credibility,
        };
        let out = expected_total_cost(&request, &solver).unwrap();
        let w = normalize_weights(
            &scenarios.iter().map(|s| s.weight).collect::<Vec<_>>(),
            alpha(0.5),
            MeasureKind::Credibility,
        )
        .unwrap();
        let by_hand: f64 = scenarios
            .iter()
            .zip(&w)
            .map(|(s, w)| {
                let c = solve_scenario(&p, s, alpha(0.5), gamma(0.5), MeasureKind::Credibility, &solver)
                    .unwrap()
                    .cost
                    .unwrap();
                w * c
            })
            .sum();
        assert_eq!(out.expected_cost, Some(by_hand));
        let total: f64 = out.scenarios.iter().map(|s| s.normalized_weight).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_layout_and_single_cell() {
        let p = ranged_profile();
        let scenarios = [scenario("a", crisp(0.6), 4.0), scenario("b", crisp(0.4), 8.0)];
        let solver = EmbeddedSolver::default();
        let grid = sweep(
            &p,
            &scenarios,
            &[alpha(0.0), alpha(0.5)],
            &[gamma(0.0), gamma(1.0)],
            MeasureKind::Credibility,
            &solver,
        );
        assert_eq!(grid.cells.len(), 4);
        assert_eq!(grid.cell(1, 0).alpha, alpha(0.5));
        assert_eq!(grid.cell(1, 0).gamma, gamma(0.0));
        assert_eq!(grid.baseline.len(), 2);

        let single = sweep(&p, &scenarios, &[alpha(0.0)], &[gamma(0.0)], MeasureKind::Credibility, &solver);
        let direct = expected_total_cost(
            &PlanRequest {
                profile: &p,
                scenarios: &scenarios,
                alpha: alpha(0.0),
                gamma: gamma(0.0),
                measure: MeasureKind::Credibility,
            },
            &solver,
        )
        .unwrap();
        assert_eq!(single.cells[0].expected_cost(), direct.expected_cost);
    }
}
