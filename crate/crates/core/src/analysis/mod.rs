//! Headline quantities: reversibility threshold, crossing years, parameter
//! sweeps, Monte Carlo bands and welfare divergence.

pub mod band;
pub mod crossing;
pub mod sweep;
pub mod threshold;

pub use band::{monte_carlo_band, BandResult, ParamIntervals};
pub use crossing::{fill_crossings, time_to_threshold};
pub use sweep::{sweep, GridAxis, SweepCell, SweepResult};
pub use threshold::{
    bisect_basin_boundary, estimate_reversibility_threshold, estimate_reversibility_threshold_with,
    long_run_fate, Fate, FateProbe, ThresholdOutcome, ThresholdReport,
};

use crate::error::{Error, Result};
use crate::model::{simulate, Trajectory};
use crate::report::config::ScenarioConfig;

/// Default bracket and tolerance for threshold estimation.
pub const THRESHOLD_BRACKET: (f64, f64) = (1e-3, 1.0);
pub const THRESHOLD_TOL: f64 = 1e-4;

/// Crossing reference of a scenario: its `c_bar_ref` if set, otherwise the
/// estimated reversibility threshold of its own parameters.
pub fn scenario_c_bar(cfg: &ScenarioConfig) -> Result<f64> {
    if let Some(c) = cfg.c_bar_ref {
        return Ok(c);
    }
    let (lo, hi) = THRESHOLD_BRACKET;
    match estimate_reversibility_threshold(&cfg.params, lo, hi, THRESHOLD_TOL)? {
        ThresholdOutcome::Bistable(r) => Ok(r.c_bar),
        ThresholdOutcome::Monostable(f) => Err(Error::Config(format!(
            "scenario `{}` has no reversibility threshold (monostable, every start {:?}); set c_bar_ref",
            cfg.id, f
        ))),
    }
}

/// Simulates a scenario over its horizon and fills in crossing years.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Trajectory> {
    let c_bar = scenario_c_bar(cfg)?;
    let mut traj = simulate(&cfg.initial, &cfg.params, &cfg.interventions, cfg.horizon_years)?;
    fill_crossings(&mut traj, c_bar)?;
    Ok(traj)
}

/// Crossing year of one domain for `cfg` against a given reference.
pub fn crossing_year_of(cfg: &ScenarioConfig, c_bar: f64, domain: usize) -> Result<Option<f64>> {
    let traj = simulate(&cfg.initial, &cfg.params, &cfg.interventions, cfg.horizon_years)?;
    time_to_threshold(&traj, c_bar, domain)
}

/// Welfare divergence of `domain` at `year` (from the run start).
pub fn divergence_at(cfg: &ScenarioConfig, year: f64, domain: usize) -> Result<f64> {
    if domain >= crate::model::DOMAINS {
        return Err(Error::DomainIndex(domain));
    }
    let traj = simulate(&cfg.initial, &cfg.params, &cfg.interventions, year)?;
    Ok(traj.last().divergence[domain])
}
