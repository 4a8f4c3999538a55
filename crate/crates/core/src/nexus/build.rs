use crate::fuzzy::{chance_bound, ConfidenceLevel, MeasureKind};
use crate::milp::{MilpProblem, RowSense, VarId};
use crate::robust::UncertainCoefficient;

use super::{
    validate_profile, validate_scenario, FuzzyParameter, NexusError, Scenario, SystemProfile,
    EXTRACTION, POWER_LINE, PURIFICATION, TREATMENT, WATER_PIPE,
};

/// gal -> Mgal
const GAL_TO_MGAL: f64 = 1e-6;

/// Handles into a built model, indexed `[asset][period]` or `[period]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelIndex {
    pub generation: Vec<Vec<VarId>>,
    pub commitment: Vec<Vec<VarId>>,
    pub startup: Vec<Vec<VarId>>,
    pub charge: Vec<Vec<VarId>>,
    pub discharge: Vec<Vec<VarId>>,
    pub soc: Vec<Vec<VarId>>,
    pub delivered: Vec<VarId>,
    pub extraction: Vec<VarId>,
    pub purified: Vec<VarId>,
    pub treated: Vec<VarId>,
    pub unmet_power: Vec<Option<VarId>>,
    pub unmet_water: Vec<Option<VarId>>,
    pub untreated: Vec<Option<VarId>>,
    pub power_balance: Vec<usize>,
    pub water_balance: Vec<usize>,
    pub wastewater_balance: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct NexusModel {
    pub problem: MilpProblem,
    /// Ranged coefficients for the robust counterpart; empty when the profile
    /// declares no deviations.
    pub uncertain: Vec<UncertainCoefficient>,
    pub index: ModelIndex,
}

struct Coefficients {
    discharge_efficiency: Vec<f64>,
    purification_efficiency: f64,
}

/// Builds the scenario MILP with fuzzy efficiencies replaced by their chance
/// constraint thresholds at `alpha` under `measure`.
pub fn build_model(
    profile: &SystemProfile,
    scenario: &Scenario,
    alpha: ConfidenceLevel,
    measure: MeasureKind,
) -> Result<NexusModel, NexusError> {
    let crisp = |p: &FuzzyParameter| chance_bound(&p.value, alpha, p.sense, measure);
    let coefs = Coefficients {
        discharge_efficiency: profile
            .batteries
            .iter()
            .map(|b| crisp(&b.discharge_efficiency))
            .collect(),
        purification_efficiency: crisp(&profile.water.purification_efficiency),
    };
    assemble(profile, scenario, &coefs, true)
}

/// Builds the scenario MILP with every fuzzy efficiency at its plateau
/// midpoint and no ranged coefficients.
pub fn deterministic_model(
    profile: &SystemProfile,
    scenario: &Scenario,
) -> Result<NexusModel, NexusError> {
    let coefs = Coefficients {
        discharge_efficiency: profile
            .batteries
            .iter()
            .map(|b| b.discharge_efficiency.value.plateau_midpoint())
            .collect(),
        purification_efficiency: profile.water.purification_efficiency.value.plateau_midpoint(),
    };
    assemble(profile, scenario, &coefs, false)
}

fn assemble(
    profile: &SystemProfile,
    scenario: &Scenario,
    coefs: &Coefficients,
    ranged: bool,
) -> Result<NexusModel, NexusError> {
    let mut violations = validate_profile(profile);
    violations.extend(validate_scenario(profile, scenario, 0));
    if !violations.is_empty() {
        return Err(NexusError::Invalid(violations));
    }

    let horizon = profile.horizon;
    let periods = 0..horizon;
    let mut m = MilpProblem::new(format!("nexus-{}", scenario.name));
    let mut uncertain = Vec::new();
    let avail = |key: &str| scenario.availability_of(key);
    let pen = &profile.penalties;
    let water = &profile.water;
    let tx = &profile.transmission;
    let ww = &profile.wastewater;

    let mut generation = Vec::new();
    let mut commitment = Vec::new();
    let mut startup = Vec::new();
    for g in &profile.generators {
        let cap = avail(&g.name) * g.capacity;
        let mut p = Vec::with_capacity(horizon);
        let mut u = Vec::with_capacity(horizon);
        let mut su = Vec::with_capacity(horizon);
        for t in periods.clone() {
            p.push(m.add_continuous(format!("p[{},{t}]", g.name), 0.0, cap)?);
            u.push(m.add_binary(format!("u[{},{t}]", g.name))?);
            su.push(m.add_continuous(format!("su[{},{t}]", g.name), 0.0, 1.0)?);
            m.add_objective(p[t], g.fuel_cost)?;
            m.add_objective(su[t], g.startup_cost)?;
        }
        generation.push(p);
        commitment.push(u);
        startup.push(su);
    }

    let mut charge = Vec::new();
    let mut discharge = Vec::new();
    let mut soc = Vec::new();
    for b in &profile.batteries {
        let a = avail(&b.name);
        let mut ch = Vec::with_capacity(horizon);
        let mut dis = Vec::with_capacity(horizon);
        let mut s = Vec::with_capacity(horizon);
        for t in periods.clone() {
            ch.push(m.add_continuous(format!("ch[{},{t}]", b.name), 0.0, a * b.max_charge)?);
            dis.push(m.add_continuous(format!("dis[{},{t}]", b.name), 0.0, a * b.max_discharge)?);
            s.push(m.add_continuous(format!("soc[{},{t}]", b.name), 0.0, b.energy_capacity)?);
        }
        charge.push(ch);
        discharge.push(dis);
        soc.push(s);
    }

    let mut delivered = Vec::with_capacity(horizon);
    let mut extraction = Vec::with_capacity(horizon);
    let mut purified = Vec::with_capacity(horizon);
    let mut treated = Vec::with_capacity(horizon);
    let mut unmet_power = Vec::with_capacity(horizon);
    let mut unmet_water = Vec::with_capacity(horizon);
    let mut untreated = Vec::with_capacity(horizon);
    let pur_cap = (avail(PURIFICATION) * water.purification_capacity)
        .min(avail(WATER_PIPE) * tx.water_pipe_capacity);
    for t in periods.clone() {
        let line = m.add_continuous(format!("line[{t}]"), 0.0, avail(POWER_LINE) * tx.power_line_capacity)?;
        let ext = m.add_continuous(format!("ext[{t}]"), 0.0, avail(EXTRACTION) * water.extraction_capacity)?;
        let pur = m.add_continuous(format!("pur[{t}]"), 0.0, pur_cap)?;
        let treat = m.add_continuous(format!("treat[{t}]"), 0.0, avail(TREATMENT) * ww.treatment_capacity)?;
        m.add_objective(ext, water.extraction_cost)?;
        m.add_objective(pur, water.purification_cost + tx.pumping_cost)?;
        m.add_objective(treat, ww.treatment_cost)?;
        let slack = |m: &mut MilpProblem, name: &str, price: Option<f64>| -> Result<Option<VarId>, NexusError> {
            match price {
                Some(c) => {
                    let v = m.add_continuous(format!("{name}[{t}]"), 0.0, f64::INFINITY)?;
                    m.add_objective(v, c)?;
                    Ok(Some(v))
                }
                None => Ok(None),
            }
        };
        unmet_power.push(slack(&mut m, "unmet_power", pen.unmet_power)?);
        unmet_water.push(slack(&mut m, "unmet_water", pen.unmet_water)?);
        untreated.push(slack(&mut m, "untreated", pen.untreated_wastewater)?);
        delivered.push(line);
        extraction.push(ext);
        purified.push(pur);
        treated.push(treat);
    }

    let mut power_balance = Vec::with_capacity(horizon);
    let mut water_balance = Vec::with_capacity(horizon);
    let mut wastewater_balance = Vec::with_capacity(horizon);
    for t in periods.clone() {
        let mut terms = vec![(delivered[t], 1.0)];
        for b in 0..profile.batteries.len() {
            terms.push((discharge[b][t], 1.0));
            terms.push((charge[b][t], -1.0));
        }
        if let Some(v) = unmet_power[t] {
            terms.push((v, 1.0));
        }
        terms.push((extraction[t], -water.pumping_energy));
        terms.push((purified[t], -water.purification_energy));
        terms.push((treated[t], -ww.treatment_energy));
        power_balance.push(m.add_constraint(
            format!("power_balance[{t}]"),
            terms,
            RowSense::Eq,
            scenario.power_demand[t],
        )?);

        let label = format!("line_loss[{t}]");
        let keep = 1.0 - tx.loss_fraction;
        let mut terms = vec![(delivered[t], 1.0)];
        terms.extend(generation.iter().map(|p| (p[t], -keep)));
        m.add_constraint(label.clone(), terms, RowSense::Le, 0.0)?;
        if ranged && tx.loss_deviation > 0.0 && keep != 0.0 {
            for p in &generation {
                uncertain.push(UncertainCoefficient::new(&label, p[t], -keep, tx.loss_deviation));
            }
        }

        let mut terms = vec![(purified[t], 1.0)];
        if let Some(v) = unmet_water[t] {
            terms.push((v, 1.0));
        }
        for (g, p) in profile.generators.iter().zip(&generation) {
            terms.push((p[t], -g.water_withdrawal * GAL_TO_MGAL));
        }
        water_balance.push(m.add_constraint(
            format!("water_balance[{t}]"),
            terms,
            RowSense::Eq,
            scenario.water_demand[t],
        )?);

        let label = format!("purification[{t}]");
        let eta = coefs.purification_efficiency;
        m.add_constraint(
            label.clone(),
            [(purified[t], 1.0), (extraction[t], -eta)],
            RowSense::Le,
            0.0,
        )?;
        if ranged && water.purification_efficiency_deviation > 0.0 && eta != 0.0 {
            uncertain.push(UncertainCoefficient::new(
                label,
                extraction[t],
                -eta,
                water.purification_efficiency_deviation,
            ));
        }

        let r = ww.return_fraction;
        let mut terms = vec![(treated[t], 1.0)];
        if let Some(v) = untreated[t] {
            terms.push((v, 1.0));
        }
        if let Some(v) = unmet_water[t] {
            terms.push((v, r));
        }
        wastewater_balance.push(m.add_constraint(
            format!("wastewater[{t}]"),
            terms,
            RowSense::Eq,
            r * scenario.water_demand[t],
        )?);
    }

    for (gi, g) in profile.generators.iter().enumerate() {
        let cap = avail(&g.name) * g.capacity;
        let (p, u, su) = (&generation[gi], &commitment[gi], &startup[gi]);
        for t in periods.clone() {
            let label = format!("gen_cap[{},{t}]", g.name);
            m.add_constraint(label.clone(), [(p[t], 1.0), (u[t], -cap)], RowSense::Le, 0.0)?;
            let dev = avail(&g.name) * g.capacity_deviation;
            if ranged && dev > 0.0 && cap != 0.0 {
                uncertain.push(UncertainCoefficient::new(label, u[t], -cap, dev));
            }
            if g.min_output > 0.0 {
                m.add_constraint(
                    format!("gen_min[{},{t}]", g.name),
                    [(p[t], 1.0), (u[t], -g.min_output)],
                    RowSense::Ge,
                    0.0,
                )?;
            }
            let label = format!("startup[{},{t}]", g.name);
            if t == 0 {
                let was_on = if g.initially_on { 1.0 } else { 0.0 };
                m.add_constraint(label, [(su[t], 1.0), (u[t], -1.0)], RowSense::Ge, -was_on)?;
            } else {
                m.add_constraint(
                    label,
                    [(su[t], 1.0), (u[t], -1.0), (u[t - 1], 1.0)],
                    RowSense::Ge,
                    0.0,
                )?;
            }
        }
    }

    // State of charge, multiplied through by the discharge efficiency:
    // eta_d*soc[t] - eta_d*soc[t-1] - eta_d*eta_c*ch[t] + dis[t] = 0
    for (bi, b) in profile.batteries.iter().enumerate() {
        let eta_d = coefs.discharge_efficiency[bi];
        let eta_c = b.charge_efficiency;
        let (ch, dis, s) = (&charge[bi], &discharge[bi], &soc[bi]);
        for t in periods.clone() {
            let mut terms = vec![(s[t], eta_d), (ch[t], -eta_d * eta_c), (dis[t], 1.0)];
            let rhs = if t == 0 {
                eta_d * b.initial_soc
            } else {
                terms.push((s[t - 1], -eta_d));
                0.0
            };
            m.add_constraint(format!("soc[{},{t}]", b.name), terms, RowSense::Eq, rhs)?;
        }
        m.add_constraint(
            format!("soc_end[{}]", b.name),
            [(s[horizon - 1], 1.0)],
            RowSense::Ge,
            b.initial_soc,
        )?;
    }

    Ok(NexusModel {
        problem: m,
        uncertain,
        index: ModelIndex {
            generation,
            commitment,
            startup,
            charge,
            discharge,
            soc,
            delivered,
            extraction,
            purified,
            treated,
            unmet_power,
            unmet_water,
            untreated,
            power_balance,
            water_balance,
            wastewater_balance,
        },
    })
}
