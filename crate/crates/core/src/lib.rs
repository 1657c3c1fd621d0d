//! Solver library for two-stage stochastic multi-commodity network design
//! under correlated corridor disruptions, with decision-dependent scenario
//! probabilities and a mean-CVaR objective.
//!
//! The crate is organized around the pipeline:
//!
//! * [`model`] — domain types (instances, scenarios, designs), validation,
//!   decision-dependent probability arithmetic, and closed-form CVaR.
//! * [`lp`] — a self-contained bounded-variable revised simplex engine
//!   producing primal/dual solutions and Farkas infeasibility certificates.
//! * [`milp`] — branch and bound over binary variables on top of [`lp`].
//! * [`ef`] — the deterministic-equivalent (extensive form) MILP with exact
//!   McCormick linearization of the activation-probability products.
//! * [`recourse`] — scenario subproblems, dual-based optimality and
//!   feasibility cuts, and design evaluation.
//! * [`benders`] — the decomposition loop with corridor group cuts.
//! * [`experiments`] — the value-of-modeling experiment battery.
//! * [`io`] — CSV calibration bundles, bundled instance generators.

pub mod benders;
pub mod ef;
pub mod experiments;
pub mod hash;
pub mod io;
pub mod lp;
pub mod milp;
pub mod model;
pub mod recourse;
pub mod report;

pub use model::{
    Arc, Commodity, Corridor, DduMatrix, FirstStageDesign, Instance, Node, RiskParams, Scenario,
};
