//! Fuzzy-robust planning for coupled energy and water systems.
//!
//! * [`fuzzy`]: trapezoidal fuzzy numbers, possibility / necessity /
//!   credibility measures and crisp equivalents of fuzzy chance constraints.
//! * [`milp`]: model representation and the embedded simplex /
//!   branch-and-bound solver, MPS export.
//! * [`robust`]: budget-of-uncertainty robust counterparts.
//! * [`nexus`]: the energy-water system model builder.
//! * [`planner`]: per-scenario solves, weight normalisation, expected total
//!   cost and conservativity sweeps.

pub mod fuzzy;
pub mod milp;
pub mod nexus;
pub mod planner;
pub mod robust;
