use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::schedule::SalienceSchedule;
use crate::model::DOMAINS;

/// Spillover weights between domains, row = receiving domain.
pub type CouplingMatrix = [[f64; DOMAINS]; DOMAINS];

/// Rate constants, coupling and schedules for the coupled model.
///
/// Field names double as the JSON keys of the scenario format. Missing keys
/// fall back to [`ModelParams::default`], which is the frozen baseline
/// calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Per-year capacity erosion from delegation.
    pub delta: f64,
    /// Per-year atrophy while capacity sits unused.
    pub alpha: f64,
    /// Capacity weight in the delegation response.
    pub gamma: f64,
    /// Delegation level at which capacity counts as unused.
    pub theta_use: f64,
    /// Gain of the lock-in gap on salience.
    #[serde(rename = "kappa_L")]
    pub kappa_l: f64,
    /// Logistic recovery rate.
    pub rho_r: f64,
    /// Additive protected recovery (decoupled capacity streams).
    pub a_dec: f64,
    pub c_max: f64,
    pub coupling: CouplingMatrix,
    /// Drift speed of human values.
    pub rho_v: f64,
    /// Re-alignment gain of encoded values per unit capacity.
    pub mu: f64,
    pub m_forum: f64,
    /// Saturation scale of welfare divergence.
    pub sigma_w: f64,
    /// Ceiling on delegation.
    pub d_cap: f64,
    pub salience_schedule: SalienceSchedule,
    /// Integration step in years.
    pub dt: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        crate::scenarios::Calibration::frozen().baseline_params()
    }
}

/// Uniform off-diagonal coupling.
pub fn uniform_coupling(weight: f64) -> CouplingMatrix {
    let mut w = [[weight; DOMAINS]; DOMAINS];
    for (i, row) in w.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    w
}

fn check(key: &str, ok: bool, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::out_of_range(key, reason))
    }
}

fn finite_in(x: f64, lo: f64, hi: f64) -> bool {
    x.is_finite() && x >= lo && x <= hi
}

impl ModelParams {
    /// Checks every declared range. Errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        check("delta", finite_in(self.delta, 0.0, 1.0) && self.delta < 1.0, "must lie in [0, 1)")?;
        check("alpha", finite_in(self.alpha, 0.0, 1.0) && self.alpha < 1.0, "must lie in [0, 1)")?;
        check(
            "delta",
            self.delta + self.alpha < 1.0,
            "delta + alpha must be < 1",
        )?;
        check("gamma", self.gamma.is_finite() && self.gamma > 0.0, "must be > 0")?;
        check("theta_use", finite_in(self.theta_use, 0.0, 1.0), "must lie in [0, 1]")?;
        check("kappa_L", finite_in(self.kappa_l, 0.0, f64::MAX), "must be >= 0")?;
        check("rho_r", finite_in(self.rho_r, 0.0, f64::MAX), "must be >= 0")?;
        check("a_dec", finite_in(self.a_dec, 0.0, f64::MAX), "must be >= 0")?;
        check("c_max", self.c_max.is_finite() && self.c_max > 0.0, "must be > 0")?;
        for (i, row) in self.coupling.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                check("coupling", finite_in(*w, 0.0, f64::MAX), "entries must be finite and >= 0")?;
                check("coupling", i != j || *w == 0.0, "diagonal must be exactly 0")?;
            }
        }
        check("rho_v", finite_in(self.rho_v, 0.0, f64::MAX), "must be >= 0")?;
        check("mu", finite_in(self.mu, 0.0, f64::MAX), "must be >= 0")?;
        check("m_forum", finite_in(self.m_forum, 1.0, f64::MAX), "must be >= 1")?;
        check("sigma_w", self.sigma_w.is_finite() && self.sigma_w > 0.0, "must be > 0")?;
        check("d_cap", finite_in(self.d_cap, 0.0, 1.0) && self.d_cap > 0.0, "must lie in (0, 1]")?;
        check(
            "salience_schedule",
            self.salience_schedule.starts_at_zero(),
            "first point must be at year 0",
        )?;
        check("dt", finite_in(self.dt, 0.0, 1.0) && self.dt > 0.0, "must lie in (0, 1]")?;
        check("dt", steps_per_year(self.dt).is_some(), "must divide one year exactly")?;
        Ok(())
    }

    /// Parameters with every rate switched off and a constant schedule, so
    /// the state only advances in time.
    pub fn zero_dynamics(salience: f64) -> Self {
        Self {
            delta: 0.0,
            alpha: 0.0,
            kappa_l: 0.0,
            rho_r: 0.0,
            a_dec: 0.0,
            rho_v: 0.0,
            mu: 0.0,
            salience_schedule: SalienceSchedule::constant(salience)
                .expect("finite nonnegative level"),
            ..Self::default()
        }
    }

    /// Single-domain autonomous variant: no coupling, salience frozen at its
    /// t = 0 level, no lock-in feedback.
    pub fn autonomous(&self) -> Self {
        Self {
            coupling: [[0.0; DOMAINS]; DOMAINS],
            kappa_l: 0.0,
            salience_schedule: self.salience_schedule.frozen_at_start(),
            ..self.clone()
        }
    }
}

/// Number of steps per year when `dt` divides one year, else `None`.
pub fn steps_per_year(dt: f64) -> Option<u64> {
    whole_steps(1.0, dt)
}

/// `span / dt` when it is a positive whole number (to 1e-9 relative).
pub fn whole_steps(span: f64, dt: f64) -> Option<u64> {
    if dt.is_nan() || dt <= 0.0 || !span.is_finite() || span <= 0.0 {
        return None;
    }
    let n = (span / dt).round();
    if n < 1.0 || ((n * dt) - span).abs() > 1e-9 * span.max(1.0) {
        None
    } else {
        Some(n as u64)
    }
}
