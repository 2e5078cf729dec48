use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interventions::delegation_cap;
use crate::model::dynamics::{delegation_fraction, usage_indicator};
use crate::model::params::ModelParams;
use crate::model::DOMAINS;

/// The three coupled domains, in their fixed storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Economic,
    Political,
    Cultural,
}

impl Domain {
    pub const ALL: [Domain; DOMAINS] = [Domain::Economic, Domain::Political, Domain::Cultural];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL.get(i).copied().ok_or(Error::DomainIndex(i))
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Economic => "economic",
            Domain::Political => "political",
            Domain::Cultural => "cultural",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainState {
    /// Capacity.
    pub c: f64,
    /// Salience.
    pub s: f64,
    /// Delegation fraction.
    pub d: f64,
    /// Unused-capacity indicator, 0 or 1.
    pub u: u8,
    /// Encoded value position.
    pub v_e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemState {
    /// Years since the start of the run.
    pub t: f64,
    pub domains: [DomainState; DOMAINS],
    /// Human value position.
    pub v_h: f64,
}

impl DomainState {
    /// State at capacity `c` and salience `s` with delegation and usage
    /// derived from `params`.
    pub fn derived(c: f64, s: f64, v_e: f64, params: &ModelParams) -> Result<Self> {
        let d = delegation_cap(delegation_fraction(s, c, params.gamma)?, params);
        Ok(Self {
            c,
            s,
            d,
            u: usage_indicator(d, params.theta_use)?,
            v_e,
        })
    }

    pub fn validate(&self, i: usize) -> Result<()> {
        let key = |f: &str| format!("initial.domains[{i}].{f}");
        if !(self.c.is_finite() && self.c >= 0.0) {
            return Err(Error::out_of_range(key("c"), "must be finite and >= 0"));
        }
        if !(self.s.is_finite() && self.s >= 0.0) {
            return Err(Error::out_of_range(key("s"), "must be finite and >= 0"));
        }
        if !(self.d.is_finite() && (0.0..=1.0).contains(&self.d)) {
            return Err(Error::out_of_range(key("d"), "must lie in [0, 1]"));
        }
        if self.u > 1 {
            return Err(Error::out_of_range(key("u"), "must be 0 or 1"));
        }
        if !self.v_e.is_finite() {
            return Err(Error::out_of_range(key("v_e"), "must be finite"));
        }
        Ok(())
    }
}

impl SystemState {
    /// All domains at capacity `c0`, salience at the schedule's t = 0 level,
    /// values aligned at 0.
    pub fn uniform(c0: f64, params: &ModelParams) -> Result<Self> {
        Self::from_capacities([c0; DOMAINS], params)
    }

    pub fn from_capacities(c0: [f64; DOMAINS], params: &ModelParams) -> Result<Self> {
        let s0 = params.salience_schedule.at(0.0)?;
        let mut domains = [DomainState {
            c: 0.0,
            s: 0.0,
            d: 0.0,
            u: 0,
            v_e: 0.0,
        }; DOMAINS];
        for i in 0..DOMAINS {
            domains[i] = DomainState::derived(c0[i], s0[i], 0.0, params)?;
        }
        Ok(Self {
            t: 0.0,
            domains,
            v_h: 0.0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(Error::out_of_range("initial.t", "must be finite and >= 0"));
        }
        if !self.v_h.is_finite() {
            return Err(Error::out_of_range("initial.v_h", "must be finite"));
        }
        for (i, d) in self.domains.iter().enumerate() {
            d.validate(i)?;
        }
        Ok(())
    }
}
