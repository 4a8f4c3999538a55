//! Energy-water system description and the per-scenario MILP builder.
//!
//! Units: power and energy in MW / MWh per hourly period, water volumes in
//! Mgal, generator water withdrawal in gal/MWh, money in $.

mod build;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{ConstraintSense, TrapezoidalFuzzyNumber};
use crate::milp::ModelError;

pub use build::{build_model, deterministic_model, ModelIndex, NexusModel};

/// Availability key for the aggregate power line.
pub const POWER_LINE: &str = "power_line";
/// Availability key for the aggregate water pipe.
pub const WATER_PIPE: &str = "water_pipe";
pub const EXTRACTION: &str = "extraction";
pub const PURIFICATION: &str = "purification";
pub const TREATMENT: &str = "treatment";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub name: String,
    /// MW
    pub capacity: f64,
    /// MW while committed
    pub min_output: f64,
    /// $/MWh
    pub fuel_cost: f64,
    /// $ per start
    pub startup_cost: f64,
    /// gal/MWh
    pub water_withdrawal: f64,
    #[serde(default)]
    pub initially_on: bool,
    /// Half-width of the ranged capacity (MW); zero keeps capacity certain.
    #[serde(default)]
    pub capacity_deviation: f64,
}

/// A fuzzy model parameter and the direction its chance constraint guards.
///
/// Efficiencies guard `{v >= g}`: the crisp coefficient is the level the
/// true value exceeds with the requested confidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "FuzzyParameterSpec")]
pub struct FuzzyParameter {
    pub value: TrapezoidalFuzzyNumber,
    pub sense: ConstraintSense,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FuzzyParameterSpec {
    Bare(TrapezoidalFuzzyNumber),
    Full {
        value: TrapezoidalFuzzyNumber,
        sense: ConstraintSense,
    },
}

impl From<FuzzyParameterSpec> for FuzzyParameter {
    fn from(spec: FuzzyParameterSpec) -> Self {
        match spec {
            FuzzyParameterSpec::Bare(value) => FuzzyParameter::efficiency(value),
            FuzzyParameterSpec::Full { value, sense } => FuzzyParameter { value, sense },
        }
    }
}

impl FuzzyParameter {
    pub fn efficiency(value: TrapezoidalFuzzyNumber) -> Self {
        Self {
            value,
            sense: ConstraintSense::FuzzyGE,
        }
    }

    pub fn crisp(value: f64) -> Result<Self, crate::fuzzy::FuzzyError> {
        Ok(Self::efficiency(TrapezoidalFuzzyNumber::crisp(value)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Battery {
    pub name: String,
    /// MWh
    pub energy_capacity: f64,
    /// MW
    pub max_charge: f64,
    /// MW
    pub max_discharge: f64,
    pub charge_efficiency: f64,
    pub discharge_efficiency: FuzzyParameter,
    /// MWh at the start of the horizon; the horizon must end at least as full.
    #[serde(default)]
    pub initial_soc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaterAssets {
    /// Mgal/h
    pub extraction_capacity: f64,
    /// $/Mgal
    pub extraction_cost: f64,
    /// MWh/Mgal extracted
    pub pumping_energy: f64,
    /// Mgal/h of purified output
    pub purification_capacity: f64,
    /// MWh/Mgal purified
    pub purification_energy: f64,
    /// $/Mgal purified
    #[serde(default)]
    pub purification_cost: f64,
    /// Purified output per unit of raw water.
    pub purification_efficiency: FuzzyParameter,
    /// Half-width of the ranged purification efficiency; zero disables it.
    #[serde(default)]
    pub purification_efficiency_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wastewater {
    /// Mgal/h
    pub treatment_capacity: f64,
    /// MWh/Mgal
    pub treatment_energy: f64,
    /// $/Mgal
    #[serde(default)]
    pub treatment_cost: f64,
    /// Fraction of delivered water returned as wastewater.
    pub return_fraction: f64,
}

/// Shortfall prices; `None` makes the corresponding balance a hard constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Penalties {
    /// $/MWh
    pub unmet_power: Option<f64>,
    /// $/Mgal
    pub unmet_water: Option<f64>,
    /// $/Mgal
    pub untreated_wastewater: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transmission {
    /// MW
    pub power_line_capacity: f64,
    pub loss_fraction: f64,
    /// Half-width of the ranged loss fraction; zero disables it.
    #[serde(default)]
    pub loss_deviation: f64,
    /// Mgal/h
    pub water_pipe_capacity: f64,
    /// $/Mgal conveyed
    #[serde(default)]
    pub pumping_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemProfile {
    /// Number of hourly periods.
    pub horizon: usize,
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub batteries: Vec<Battery>,
    pub water: WaterAssets,
    pub wastewater: Wastewater,
    pub penalties: Penalties,
    pub transmission: Transmission,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub weight: TrapezoidalFuzzyNumber,
    /// MWh per period
    pub power_demand: Vec<f64>,
    /// Mgal per period
    pub water_demand: Vec<f64>,
    /// Capacity multipliers in `[0, 1]` keyed by generator / battery name or
    /// one of the aggregate asset keys.
    #[serde(default)]
    pub availability: BTreeMap<String, f64>,
}

impl Scenario {
    pub fn availability_of(&self, key: &str) -> f64 {
        self.availability.get(key).copied().unwrap_or(1.0)
    }
}

/// One broken invariant, addressed by a dotted field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NexusError {
    #[error("invalid input: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Model(#[from] ModelError),
}

struct Checker {
    out: Vec<Violation>,
}

impl Checker {
    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.out.push(Violation {
            field: field.into(),
            message: message.into(),
        });
    }

    fn finite(&mut self, field: &str, v: f64) -> bool {
        if v.is_finite() {
            true
        } else {
            self.push(field, format!("must be finite, got {v}"));
            false
        }
    }

    fn nonneg(&mut self, field: &str, v: f64) {
        if self.finite(field, v) && v < 0.0 {
            self.push(field, format!("must be >= 0, got {v}"));
        }
    }

    fn fraction(&mut self, field: &str, v: f64, lower_open: bool) {
        if !self.finite(field, v) {
            return;
        }
        let ok = if lower_open { v > 0.0 } else { v >= 0.0 } && v <= 1.0;
        if !ok {
            let lo = if lower_open { "(0" } else { "[0" };
            self.push(field, format!("must lie in {lo}, 1], got {v}"));
        }
    }

    fn efficiency(&mut self, field: &str, p: &FuzzyParameter) {
        let v = p.value;
        if v.nu1() <= 0.0 {
            self.push(field, format!("membership support {v} must be strictly positive"));
        }
        if v.nu4() > 1.0 {
            self.push(field, format!("membership support {v} exceeds 1"));
        }
    }
}

/// Checks every documented invariant of `profile`; empty means valid.
pub fn validate_profile(profile: &SystemProfile) -> Vec<Violation> {
    let mut c = Checker { out: Vec::new() };
    if profile.horizon < 1 {
        c.push("horizon", "must be at least 1");
    }
    let mut names = BTreeSet::new();
    for (i, g) in profile.generators.iter().enumerate() {
        let f = |s: &str| format!("generators[{i}].{s}");
        if !names.insert(g.name.clone()) {
            c.push(f("name"), format!("duplicate asset name '{}'", g.name));
        }
        c.nonneg(&f("capacity"), g.capacity);
        c.nonneg(&f("min_output"), g.min_output);
        c.nonneg(&f("fuel_cost"), g.fuel_cost);
        c.nonneg(&f("startup_cost"), g.startup_cost);
        c.nonneg(&f("water_withdrawal"), g.water_withdrawal);
        c.nonneg(&f("capacity_deviation"), g.capacity_deviation);
        if g.min_output > g.capacity {
            c.push(f("min_output"), format!("exceeds capacity {}", g.capacity));
        }
        if g.capacity_deviation > g.capacity {
            c.push(f("capacity_deviation"), format!("exceeds capacity {}", g.capacity));
        }
    }
    for (i, b) in profile.batteries.iter().enumerate() {
        let f = |s: &str| format!("batteries[{i}].{s}");
        if !names.insert(b.name.clone()) {
            c.push(f("name"), format!("duplicate asset name '{}'", b.name));
        }
        c.nonneg(&f("energy_capacity"), b.energy_capacity);
        c.nonneg(&f("max_charge"), b.max_charge);
        c.nonneg(&f("max_discharge"), b.max_discharge);
        c.fraction(&f("charge_efficiency"), b.charge_efficiency, true);
        c.efficiency(&f("discharge_efficiency"), &b.discharge_efficiency);
        c.nonneg(&f("initial_soc"), b.initial_soc);
        if b.initial_soc > b.energy_capacity {
            c.push(f("initial_soc"), format!("exceeds energy capacity {}", b.energy_capacity));
        }
    }
    for key in [POWER_LINE, WATER_PIPE, EXTRACTION, PURIFICATION, TREATMENT] {
        if names.contains(key) {
            c.push("generators/batteries", format!("asset name '{key}' is reserved"));
        }
    }

    let w = &profile.water;
    c.nonneg("water.extraction_capacity", w.extraction_capacity);
    c.nonneg("water.extraction_cost", w.extraction_cost);
    c.nonneg("water.pumping_energy", w.pumping_energy);
    c.nonneg("water.purification_capacity", w.purification_capacity);
    c.nonneg("water.purification_energy", w.purification_energy);
    c.nonneg("water.purification_cost", w.purification_cost);
    c.efficiency("water.purification_efficiency", &w.purification_efficiency);
    c.nonneg(
        "water.purification_efficiency_deviation",
        w.purification_efficiency_deviation,
    );
    if w.purification_efficiency_deviation >= w.purification_efficiency.value.nu1()
        && w.purification_efficiency_deviation > 0.0
    {
        c.push(
            "water.purification_efficiency_deviation",
            "must be smaller than the lowest efficiency",
        );
    }

    let ww = &profile.wastewater;
    c.nonneg("wastewater.treatment_capacity", ww.treatment_capacity);
    c.nonneg("wastewater.treatment_energy", ww.treatment_energy);
    c.nonneg("wastewater.treatment_cost", ww.treatment_cost);
    c.fraction("wastewater.return_fraction", ww.return_fraction, false);

    let p = &profile.penalties;
    for (field, v) in [
        ("penalties.unmet_power", p.unmet_power),
        ("penalties.unmet_water", p.unmet_water),
        ("penalties.untreated_wastewater", p.untreated_wastewater),
    ] {
        if let Some(v) = v {
            c.nonneg(field, v);
        }
    }

    let t = &profile.transmission;
    c.nonneg("transmission.power_line_capacity", t.power_line_capacity);
    c.nonneg("transmission.water_pipe_capacity", t.water_pipe_capacity);
    c.nonneg("transmission.pumping_cost", t.pumping_cost);
    c.nonneg("transmission.loss_deviation", t.loss_deviation);
    if c.finite("transmission.loss_fraction", t.loss_fraction)
        && !(0.0..1.0).contains(&t.loss_fraction)
    {
        c.push(
            "transmission.loss_fraction",
            format!("must lie in [0, 1), got {}", t.loss_fraction),
        );
    }
    if t.loss_fraction + t.loss_deviation >= 1.0 {
        c.push(
            "transmission.loss_deviation",
            "worst-case loss fraction must stay below 1",
        );
    }
    c.out
}

/// Checks a scenario against the profile it will be solved with.
pub fn validate_scenario(profile: &SystemProfile, scenario: &Scenario, index: usize) -> Vec<Violation> {
    let mut c = Checker { out: Vec::new() };
    let f = |s: &str| format!("scenarios[{index}].{s}");
    let w = scenario.weight;
    if w.nu1() < 0.0 {
        c.push(f("weight"), format!("weight {w} must be nonnegative"));
    }
    for (field, series) in [
        ("power_demand", &scenario.power_demand),
        ("water_demand", &scenario.water_demand),
    ] {
        if series.len() != profile.horizon {
            c.push(
                f(field),
                format!(
                    "series has {} entries, horizon is {}",
                    series.len(),
                    profile.horizon
                ),
            );
        }
        for (t, v) in series.iter().enumerate() {
            if !v.is_finite() || *v < 0.0 {
                c.push(format!("{}[{t}]", f(field)), format!("demand must be finite and >= 0, got {v}"));
            }
        }
    }
    let known: BTreeSet<&str> = profile
        .generators
        .iter()
        .map(|g| g.name.as_str())
        .chain(profile.batteries.iter().map(|b| b.name.as_str()))
        .chain([POWER_LINE, WATER_PIPE, EXTRACTION, PURIFICATION, TREATMENT])
        .collect();
    for (key, v) in &scenario.availability {
        let field = format!("{}.{key}", f("availability"));
        if !known.contains(key.as_str()) {
            c.push(field, "unknown asset");
        } else {
            c.fraction(&field, *v, false);
        }
    }
    c.out
}
