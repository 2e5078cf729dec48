use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interventions::{effective_params, InterventionSet};
use crate::model::dynamics::{system_step, welfare_divergence};
use crate::model::params::{whole_steps, ModelParams};
use crate::model::state::SystemState;
use crate::model::DOMAINS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: SystemState,
    /// Welfare divergence per domain.
    pub divergence: [f64; DOMAINS],
}

/// Time-indexed record of a run. Samples are uniformly spaced by `dt` and
/// start at the initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub params_used: ModelParams,
    /// First time each domain fell below the reference threshold, once an
    /// analysis has filled it in.
    pub crossing_year: [Option<f64>; DOMAINS],
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectories are never empty")
    }

    /// `(t, c)` pairs for one domain.
    pub fn capacity_series(&self, domain: usize) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .map(|s| (s.t, s.state.domains[domain].c))
            .collect()
    }

    pub fn divergence_series(&self, domain: usize) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .map(|s| (s.t, s.divergence[domain]))
            .collect()
    }

    /// Sample at time `t` (to within half a step).
    pub fn at(&self, t: f64) -> Option<&Sample> {
        let dt = self.params_used.dt;
        self.samples.iter().find(|s| (s.t - t).abs() < 0.5 * dt)
    }
}

fn sample(state: SystemState, sigma_w: f64) -> Result<Sample> {
    let mut divergence = [0.0; DOMAINS];
    for (i, d) in state.domains.iter().enumerate() {
        divergence[i] = welfare_divergence(d.v_e, state.v_h, sigma_w)?;
    }
    Ok(Sample {
        t: state.t,
        state,
        divergence,
    })
}

fn checked_steps(
    initial: &SystemState,
    params: &ModelParams,
    interventions: &InterventionSet,
    horizon_years: f64,
) -> Result<u64> {
    params.validate()?;
    interventions.validate()?;
    initial.validate()?;
    whole_steps(horizon_years, params.dt).ok_or_else(|| {
        Error::Config(format!(
            "horizon_years = {horizon_years} must be > 0 and a whole multiple of dt = {}",
            params.dt
        ))
    })
}

/// Steps `steps` times, handing every post-step state and the effective
/// parameters used for it to `visit`.
fn advance<F>(
    initial: &SystemState,
    params: &ModelParams,
    interventions: &InterventionSet,
    steps: u64,
    mut visit: F,
) -> Result<SystemState>
where
    F: FnMut(&SystemState, &ModelParams) -> Result<()>,
{
    let mut state = initial.clone();
    for k in 1..=steps {
        let eff = effective_params(params, interventions, state.t)?;
        state = system_step(&state, &eff)?;
        // t = t0 + k*dt rather than a running sum, so grids stay exact
        state.t = initial.t + k as f64 * params.dt;
        visit(&state, &eff)?;
    }
    Ok(state)
}

/// Integrates `horizon_years` from `initial`, recompiling the interventions
/// into effective parameters at the start of every step.
///
/// Returns `horizon_years / dt + 1` samples. Identical inputs give
/// bit-identical output.
pub fn simulate(
    initial: &SystemState,
    params: &ModelParams,
    interventions: &InterventionSet,
    horizon_years: f64,
) -> Result<Trajectory> {
    let steps = checked_steps(initial, params, interventions, horizon_years)?;
    let mut samples = Vec::with_capacity(steps as usize + 1);
    samples.push(sample(initial.clone(), params.sigma_w)?);
    advance(initial, params, interventions, steps, |state, eff| {
        samples.push(sample(state.clone(), eff.sigma_w)?);
        Ok(())
    })?;
    Ok(Trajectory {
        samples,
        params_used: params.clone(),
        crossing_year: [None; DOMAINS],
    })
}

/// Same integration as [`simulate`], keeping only the final state.
pub fn run_to_end(
    initial: &SystemState,
    params: &ModelParams,
    interventions: &InterventionSet,
    horizon_years: f64,
) -> Result<SystemState> {
    let steps = checked_steps(initial, params, interventions, horizon_years)?;
    advance(initial, params, interventions, steps, |_, _| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_count() {
        let p = ModelParams::default();
        let init = SystemState::uniform(1.0, &p).unwrap();
        let none = InterventionSet::default();
        let tr = simulate(&init, &p, &none, p.dt).unwrap();
        assert_eq!(tr.len(), 2);
        let tr = simulate(&init, &p, &none, 10.0).unwrap();
        assert_eq!(tr.len(), 41);
        assert_eq!(tr.samples[0].state, init);
        assert!(simulate(&init, &p, &none, 0.0).is_err());
        assert!(simulate(&init, &p, &none, 1.1).is_err());
    }

    #[test]
    fn invalid_params_fail_before_stepping() {
        let mut p = ModelParams::default();
        let init = SystemState::uniform(1.0, &p).unwrap();
        p.sigma_w = -1.0;
        assert!(matches!(
            simulate(&init, &p, &InterventionSet::default(), 5.0),
            Err(Error::OutOfRange { key, .. }) if key == "sigma_w"
        ));
    }

    #[test]
    fn zero_dynamics_is_flat() {
        let p = ModelParams::zero_dynamics(0.7);
        let init = SystemState::from_capacities([0.9, 0.5, 0.1], &p).unwrap();
        let tr = simulate(&init, &p, &InterventionSet::default(), 5.0).unwrap();
        for (k, s) in tr.samples.iter().enumerate() {
            assert_eq!(s.t, k as f64 * p.dt);
            assert_eq!(s.state.domains, init.domains);
        }
    }

    #[test]
    fn time_grid_is_exact_for_tenths() {
        let p = ModelParams {
            dt: 0.1,
            ..ModelParams::default()
        };
        let init = SystemState::uniform(1.0, &p).unwrap();
        let tr = simulate(&init, &p, &InterventionSet::default(), 3.0).unwrap();
        assert_eq!(tr.len(), 31);
        assert_eq!(tr.last().t, 3.0);
    }

    #[test]
    fn run_to_end_matches_last_sample() {
        let p = ModelParams::default();
        let init = SystemState::uniform(0.8, &p).unwrap();
        let none = InterventionSet::default();
        let tr = simulate(&init, &p, &none, 12.0).unwrap();
        assert_eq!(run_to_end(&init, &p, &none, 12.0).unwrap(), tr.last().state);
    }
}
