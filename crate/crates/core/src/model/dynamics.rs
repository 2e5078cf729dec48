//! Single-step update rules.
//!
//! [`system_step`] composes the per-domain rules in a fixed order:
//!
//! 1. human values drift: `v_h += rho_v * dt`
//! 2. delegation `d` from the current `(s, c)`, then capped at `d_cap`
//! 3. usage indicator `u` from `d`
//! 4. spillover from the other domains' step-2 delegation
//! 5. capacity update
//! 6. encoded-value update
//! 7. salience update
//!
//! Every rule reads start-of-step values. The only exception is the spillover
//! term, which sees the delegation computed in step 2 of the same step. The
//! returned state carries `d` and `u` re-derived from its own `(s, c)`, so a
//! sample is always self-consistent.

use crate::error::{Error, Result};
use crate::interventions::delegation_cap;
use crate::model::params::ModelParams;
use crate::model::state::{DomainState, SystemState};
use crate::model::DOMAINS;

fn nonneg(arg: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        Err(Error::Domain {
            arg,
            value,
            reason: "must be finite",
        })
    } else if value < 0.0 {
        Err(Error::Domain {
            arg,
            value,
            reason: "must be >= 0",
        })
    } else {
        Ok(value)
    }
}

/// Delegation response `s / (s + gamma * c)`; zero when there is neither
/// salience nor capacity.
pub fn delegation_fraction(s: f64, c: f64, gamma: f64) -> Result<f64> {
    let s = nonneg("s", s)?;
    let c = nonneg("c", c)?;
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Domain {
            arg: "gamma",
            value: gamma,
            reason: "must be finite and > 0",
        });
    }
    let denom = s + gamma * c;
    Ok(if denom > 0.0 { s / denom } else { 0.0 })
}

/// 1 when delegation has reached `theta_use` (boundary inclusive).
pub fn usage_indicator(d: f64, theta_use: f64) -> Result<u8> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::Domain {
            arg: "d",
            value: d,
            reason: "must lie in [0, 1]",
        });
    }
    if !(0.0..=1.0).contains(&theta_use) {
        return Err(Error::Domain {
            arg: "theta_use",
            value: theta_use,
            reason: "must lie in [0, 1]",
        });
    }
    Ok(u8::from(d >= theta_use))
}

/// Capacity after one step of length `dt`.
///
/// `c * (1 - dt*delta*(d + spill) - dt*alpha*u) + dt*(rho_r*c*(1 - c/c_max) + a_dec)`,
/// clamped at zero. With `dt = 1`, no spillover and no recovery this is
/// bit-for-bit `c * (1 - delta*d - alpha*u)`.
pub fn capacity_step(c: f64, d: f64, u: u8, spill: f64, params: &ModelParams, dt: f64) -> Result<f64> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("dt must be > 0, got {dt}")));
    }
    let c = nonneg("c", c)?;
    let spill = nonneg("spill", spill)?;
    let u = f64::from(u);
    let erosion = c * (1.0 - dt * params.delta * (d + spill) - dt * params.alpha * u);
    let recovery = dt * (params.rho_r * c * (1.0 - c / params.c_max) + params.a_dec);
    Ok((erosion + recovery).max(0.0))
}

/// Salience at the end of a step: the schedule level at `t_next` scaled up
/// by the lock-in gap.
pub fn salience_step(
    domain: usize,
    lock_in_gap: f64,
    params: &ModelParams,
    t_next: f64,
    dt: f64,
) -> Result<f64> {
    let base = params.salience_schedule.at(t_next)?[domain];
    Ok(base * (1.0 + params.kappa_l * lock_in_gap * dt))
}

/// Encoded values move toward human values at a capacity-gated rate.
///
/// The per-step gain `dt * m_forum * mu * c` is capped at 1: a large gain
/// lands on the human position instead of overshooting it.
pub fn value_step(v_e: f64, v_h: f64, c: f64, params: &ModelParams, dt: f64) -> f64 {
    let gain = (dt * params.m_forum * params.mu * c).min(1.0);
    v_e + gain * (v_h - v_e)
}

/// Saturating welfare divergence `1 - exp(-|v_h - v_e| / sigma_w)`.
pub fn welfare_divergence(v_e: f64, v_h: f64, sigma_w: f64) -> Result<f64> {
    if !(sigma_w.is_finite() && sigma_w > 0.0) {
        return Err(Error::Config(format!("sigma_w must be > 0, got {sigma_w}")));
    }
    Ok(-(-(v_h - v_e).abs() / sigma_w).exp_m1())
}

/// Advances the coupled system by one step of `params.dt`.
pub fn system_step(state: &SystemState, params: &ModelParams) -> Result<SystemState> {
    let dt = params.dt;
    let t_next = state.t + dt;
    let v_h_next = state.v_h + params.rho_v * dt;

    let mut d = [0.0; DOMAINS];
    let mut u = [0u8; DOMAINS];
    for (i, ds) in state.domains.iter().enumerate() {
        d[i] = delegation_cap(delegation_fraction(ds.s, ds.c, params.gamma)?, params);
        u[i] = usage_indicator(d[i], params.theta_use)?;
    }

    let mut next = state.domains;
    for (i, ds) in state.domains.iter().enumerate() {
        let spill: f64 = (0..DOMAINS)
            .filter(|&j| j != i)
            .map(|j| params.coupling[i][j] * d[j])
            .sum();
        let c = capacity_step(ds.c, d[i], u[i], spill, params, dt)?;
        let v_e = value_step(ds.v_e, state.v_h, ds.c, params, dt);
        let s = salience_step(i, (state.v_h - ds.v_e).abs(), params, t_next, dt)?;
        next[i] = DomainState::derived(c, s, v_e, params)?;
    }

    Ok(SystemState {
        t: t_next,
        domains: next,
        v_h: v_h_next,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::schedule::SalienceSchedule;
    use crate::model::params::uniform_coupling;

    fn bare() -> ModelParams {
        ModelParams {
            delta: 0.08,
            alpha: 0.09,
            rho_r: 0.0,
            a_dec: 0.0,
            ..ModelParams::default()
        }
    }

    #[test]
    fn delegation_examples() {
        assert_eq!(delegation_fraction(0.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(delegation_fraction(1.0, 1.0, 1.0).unwrap(), 0.5);
        assert_eq!(delegation_fraction(0.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(delegation_fraction(1.0, 0.0, 1.0).unwrap(), 1.0);
        assert!(1.0 - delegation_fraction(1.0, 1e-12, 1.0).unwrap() < 1e-11);
    }

    #[test]
    fn delegation_errors_name_argument() {
        assert!(matches!(
            delegation_fraction(-1.0, 1.0, 1.0),
            Err(Error::Domain { arg: "s", .. })
        ));
        assert!(matches!(
            delegation_fraction(1.0, -0.5, 1.0),
            Err(Error::Domain { arg: "c", .. })
        ));
        assert!(matches!(
            delegation_fraction(1.0, 1.0, 0.0),
            Err(Error::Domain { arg: "gamma", .. })
        ));
        assert!(delegation_fraction(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn usage_examples() {
        assert_eq!(usage_indicator(0.0, 0.5).unwrap(), 0);
        assert_eq!(usage_indicator(0.5, 0.5).unwrap(), 1);
        assert_eq!(usage_indicator(0.49, 0.5).unwrap(), 0);
        assert!(usage_indicator(1.2, 0.5).is_err());
        assert!(usage_indicator(0.2, -0.1).is_err());
    }

    #[test]
    fn capacity_examples() {
        let p = bare();
        assert_eq!(capacity_step(1.0, 0.0, 0, 0.0, &p, 1.0).unwrap(), 1.0);
        assert!((capacity_step(1.0, 1.0, 1, 0.0, &p, 1.0).unwrap() - 0.83).abs() < 1e-15);
        assert!((capacity_step(1.0, 0.5, 1, 0.0, &p, 1.0).unwrap() - 0.87).abs() < 1e-15);
        assert_eq!(capacity_step(0.0, 0.7, 1, 0.3, &p, 1.0).unwrap(), 0.0);
        assert!(matches!(
            capacity_step(1.0, 0.5, 1, 0.0, &p, 0.0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn capacity_clamps_at_zero() {
        let p = ModelParams {
            delta: 0.5,
            alpha: 0.45,
            rho_r: 0.0,
            a_dec: 0.0,
            ..ModelParams::default()
        };
        // spillover can push the multiplier negative
        assert_eq!(capacity_step(0.4, 1.0, 1, 2.0, &p, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn salience_examples() {
        let mut p = ModelParams {
            salience_schedule: SalienceSchedule::constant(1.0).unwrap(),
            kappa_l: 0.0,
            ..ModelParams::default()
        };
        assert_eq!(salience_step(0, 3.0, &p, 7.0, 1.0).unwrap(), 1.0);
        p.kappa_l = 0.1;
        assert!((salience_step(1, 2.0, &p, 1.0, 1.0).unwrap() - 1.2).abs() < 1e-15);
        p.salience_schedule = SalienceSchedule::constant(0.0).unwrap();
        assert_eq!(salience_step(2, 2.0, &p, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(delegation_fraction(0.0, 0.4, p.gamma).unwrap(), 0.0);
    }

    #[test]
    fn value_examples() {
        let mut p = ModelParams {
            mu: 0.0,
            m_forum: 1.0,
            ..ModelParams::default()
        };
        assert_eq!(value_step(2.0, 9.0, 1.0, &p, 1.0), 2.0);
        p.mu = 0.1;
        assert_eq!(value_step(4.0, 4.0, 1.0, &p, 1.0), 4.0);
        assert!((value_step(0.0, 10.0, 1.0, &p, 1.0) - 1.0).abs() < 1e-15);
        p.m_forum = 20.0;
        assert_eq!(value_step(0.0, 10.0, 1.0, &p, 1.0), 10.0);
    }

    #[test]
    fn divergence_examples() {
        assert_eq!(welfare_divergence(3.0, 3.0, 2.0).unwrap(), 0.0);
        let e = welfare_divergence(0.0, 2.0, 2.0).unwrap();
        assert!((e - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((e - 0.6321).abs() < 1e-4);
        let far = welfare_divergence(0.0, 1e6, 2.0).unwrap();
        assert!(far <= 1.0 && far > 1.0 - 1e-12);
        assert!(welfare_divergence(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn zero_dynamics_only_advances_time() {
        let p = ModelParams::zero_dynamics(1.3);
        let s0 = SystemState::from_capacities([1.0, 0.6, 0.2], &p).unwrap();
        let s1 = system_step(&s0, &p).unwrap();
        assert_eq!(s1.t, p.dt);
        assert_eq!(s1.domains, s0.domains);
        assert_eq!(s1.v_h, s0.v_h);
    }

    #[test]
    fn one_step_matches_hand_composition() {
        let p = ModelParams {
            kappa_l: 0.05,
            coupling: uniform_coupling(0.7),
            ..ModelParams::default()
        };
        let mut st = SystemState::from_capacities([1.0, 0.8, 0.5], &p).unwrap();
        st.v_h = 2.0;
        st.domains[1].v_e = 0.5;
        let next = system_step(&st, &p).unwrap();

        let dt = p.dt;
        let d: Vec<f64> = st
            .domains
            .iter()
            .map(|x| delegation_fraction(x.s, x.c, p.gamma).unwrap().min(p.d_cap))
            .collect();
        for i in 0..3 {
            let x = &st.domains[i];
            let u = usage_indicator(d[i], p.theta_use).unwrap();
            let spill: f64 = (0..3).filter(|&j| j != i).map(|j| 0.7 * d[j]).sum();
            let c = capacity_step(x.c, d[i], u, spill, &p, dt).unwrap();
            let v_e = value_step(x.v_e, 2.0, x.c, &p, dt);
            let s = salience_step(i, (2.0 - x.v_e).abs(), &p, dt, dt).unwrap();
            assert_eq!(next.domains[i].c, c);
            assert_eq!(next.domains[i].v_e, v_e);
            assert_eq!(next.domains[i].s, s);
            let d_next = delegation_fraction(s, c, p.gamma).unwrap().min(p.d_cap);
            assert_eq!(next.domains[i].d, d_next);
        }
        assert_eq!(next.v_h, 2.0 + p.rho_v * dt);
    }
}
