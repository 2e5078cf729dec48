//! Simulation and analysis of institutional capacity erosion under
//! salience-driven delegation.
//!
//! Three coupled domains (economic, political, cultural) each carry a
//! capacity `c`, a salience pressure `s`, a delegation share `d` and an
//! encoded value position; a single human value position drifts over time.
//! The crate provides the dynamics ([`model`]), the intervention mechanisms
//! that modify them ([`interventions`]), threshold, sweep and Monte Carlo
//! analyses ([`analysis`]), parameter fitting ([`calibration`]), the built-in
//! scenario library ([`scenarios`]) and CSV/JSON/SVG output ([`report`]).

pub mod analysis;
pub mod calibration;
pub mod error;
pub mod interventions;
pub mod model;
pub mod report;
pub mod scenarios;

pub use error::{Error, Result};
pub use interventions::{InterventionSet, Mechanism};
pub use model::{simulate, Domain, ModelParams, SystemState, Trajectory, DOMAINS};
pub use report::ScenarioConfig;
