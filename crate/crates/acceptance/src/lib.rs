//! Independent reference solvers and seeded instance generators used to
//! check the planner's building blocks.

pub mod instances;
pub mod oracle;
