//! Governance mechanisms as time-activated parameter transforms.
//!
//! Each mechanism switches on at `active_from` (years since start) and stays
//! on. A scenario is a base [`ModelParams`] plus an [`InterventionSet`];
//! [`effective_params`] compiles the pair into the parameters in force at a
//! given time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, DOMAINS};

/// Contestability registers and impact floors: scales delegation erosion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StdMitigation {
    pub active_from: f64,
    pub delta_factor: f64,
}

/// Protected budgets: an additive recovery flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoupledStreams {
    pub active_from: f64,
    pub a_dec: f64,
}

/// Deliberation mandates: caps delegation and slows disuse atrophy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrreducibleDeliberation {
    pub active_from: f64,
    pub d_cap: f64,
    pub alpha_factor: f64,
}

/// Value forums: multiplies the value re-alignment gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NestedForums {
    pub active_from: f64,
    pub m_forum: f64,
}

/// Isolation firewalls: removes cross-domain coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Firewalls {
    pub active_from: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mechanism {
    StdMitigation(StdMitigation),
    DecoupledStreams(DecoupledStreams),
    IrreducibleDeliberation(IrreducibleDeliberation),
    NestedForums(NestedForums),
    Firewalls(Firewalls),
}

/// At most one of each mechanism; absent mechanisms are the identity.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterventionSet {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_mitigation: Option<StdMitigation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoupled_streams: Option<DecoupledStreams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub irreducible_deliberation: Option<IrreducibleDeliberation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nested_forums: Option<NestedForums>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub firewalls: Option<Firewalls>,
}

fn slot<T>(slot: &mut Option<T>, value: T, name: &str) -> Result<()> {
    if slot.is_some() {
        return Err(Error::Duplicate(format!("interventions.{name}")));
    }
    *slot = Some(value);
    Ok(())
}

fn check_start(key: &str, t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::out_of_range(
            format!("interventions.{key}.active_from"),
            "must be finite and >= 0",
        ))
    }
}

impl InterventionSet {
    pub fn none() -> Self {
        Self::default()
    }

    /// Builds a set from a list, rejecting a mechanism given twice.
    pub fn from_mechanisms(list: impl IntoIterator<Item = Mechanism>) -> Result<Self> {
        let mut set = Self::default();
        for m in list {
            match m {
                Mechanism::StdMitigation(x) => slot(&mut set.std_mitigation, x, "std_mitigation")?,
                Mechanism::DecoupledStreams(x) => {
                    slot(&mut set.decoupled_streams, x, "decoupled_streams")?
                }
                Mechanism::IrreducibleDeliberation(x) => slot(
                    &mut set.irreducible_deliberation,
                    x,
                    "irreducible_deliberation",
                )?,
                Mechanism::NestedForums(x) => slot(&mut set.nested_forums, x, "nested_forums")?,
                Mechanism::Firewalls(x) => slot(&mut set.firewalls, x, "firewalls")?,
            }
        }
        set.validate()?;
        Ok(set)
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    /// Earliest activation time, if any mechanism is present.
    pub fn first_activation(&self) -> Option<f64> {
        [
            self.std_mitigation.map(|m| m.active_from),
            self.decoupled_streams.map(|m| m.active_from),
            self.irreducible_deliberation.map(|m| m.active_from),
            self.nested_forums.map(|m| m.active_from),
            self.firewalls.map(|m| m.active_from),
        ]
        .into_iter()
        .flatten()
        .reduce(f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(m) = &self.std_mitigation {
            check_start("std_mitigation", m.active_from)?;
            if !(m.delta_factor > 0.0 && m.delta_factor <= 1.0) {
                return Err(Error::out_of_range(
                    "interventions.std_mitigation.delta_factor",
                    "must lie in (0, 1]",
                ));
            }
        }
        if let Some(m) = &self.decoupled_streams {
            check_start("decoupled_streams", m.active_from)?;
            if !(m.a_dec.is_finite() && m.a_dec >= 0.0) {
                return Err(Error::out_of_range(
                    "interventions.decoupled_streams.a_dec",
                    "must be finite and >= 0",
                ));
            }
        }
        if let Some(m) = &self.irreducible_deliberation {
            check_start("irreducible_deliberation", m.active_from)?;
            if !(m.d_cap > 0.0 && m.d_cap < 1.0) {
                return Err(Error::out_of_range(
                    "interventions.irreducible_deliberation.d_cap",
                    "must lie in (0, 1)",
                ));
            }
            if !(m.alpha_factor > 0.0 && m.alpha_factor <= 1.0) {
                return Err(Error::out_of_range(
                    "interventions.irreducible_deliberation.alpha_factor",
                    "must lie in (0, 1]",
                ));
            }
        }
        if let Some(m) = &self.nested_forums {
            check_start("nested_forums", m.active_from)?;
            if !(m.m_forum.is_finite() && m.m_forum >= 1.0) {
                return Err(Error::out_of_range(
                    "interventions.nested_forums.m_forum",
                    "must be finite and >= 1",
                ));
            }
        }
        if let Some(m) = &self.firewalls {
            check_start("firewalls", m.active_from)?;
        }
        Ok(())
    }
}

/// Parameters in force at time `t`. The base is left untouched.
pub fn effective_params(base: &ModelParams, iset: &InterventionSet, t: f64) -> Result<ModelParams> {
    iset.validate()?;
    let on = |start: f64| start <= t;
    let mut p = base.clone();
    if let Some(m) = iset.std_mitigation.filter(|m| on(m.active_from)) {
        p.delta *= m.delta_factor;
    }
    if let Some(m) = iset.decoupled_streams.filter(|m| on(m.active_from)) {
        p.a_dec = m.a_dec;
    }
    if let Some(m) = iset.irreducible_deliberation.filter(|m| on(m.active_from)) {
        p.d_cap = m.d_cap;
        p.alpha *= m.alpha_factor;
    }
    if let Some(m) = iset.nested_forums.filter(|m| on(m.active_from)) {
        p.m_forum = m.m_forum;
    }
    if iset.firewalls.is_some_and(|m| on(m.active_from)) {
        p.coupling = [[0.0; DOMAINS]; DOMAINS];
    }
    Ok(p)
}

/// Delegation after the irreducible-deliberation ceiling.
pub fn delegation_cap(d_raw: f64, params: &ModelParams) -> f64 {
    d_raw.min(params.d_cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(start: f64) -> InterventionSet {
        InterventionSet {
            std_mitigation: Some(StdMitigation {
                active_from: start,
                delta_factor: 0.7,
            }),
            decoupled_streams: Some(DecoupledStreams {
                active_from: start,
                a_dec: 0.02,
            }),
            irreducible_deliberation: Some(IrreducibleDeliberation {
                active_from: start,
                d_cap: 0.4,
                alpha_factor: 0.5,
            }),
            nested_forums: Some(NestedForums {
                active_from: start,
                m_forum: 4.0,
            }),
            firewalls: Some(Firewalls { active_from: start }),
        }
    }

    #[test]
    fn empty_set_is_identity() {
        let base = ModelParams::default();
        assert_eq!(effective_params(&base, &InterventionSet::none(), 3.0).unwrap(), base);
    }

    #[test]
    fn std_mitigation_scales_delta() {
        let base = ModelParams::default();
        let eff = effective_params(&base, &full(0.0), 0.0).unwrap();
        assert!((eff.delta - 0.056).abs() < 1e-15);
        assert_eq!(eff.alpha, base.alpha * 0.5);
        assert_eq!(eff.a_dec, 0.02);
        assert_eq!(eff.d_cap, 0.4);
        assert_eq!(eff.m_forum, 4.0);
        assert_eq!(eff.coupling, [[0.0; 3]; 3]);
        // base untouched
        assert_eq!(base, ModelParams::default());
    }

    #[test]
    fn activation_is_time_gated() {
        let base = ModelParams::default();
        let set = full(5.0);
        assert_eq!(effective_params(&base, &set, 4.75).unwrap(), base);
        assert_ne!(effective_params(&base, &set, 5.0).unwrap(), base);
        assert_eq!(set.first_activation(), Some(5.0));
    }

    #[test]
    fn duplicates_rejected() {
        let f = Mechanism::Firewalls(Firewalls { active_from: 0.0 });
        assert!(matches!(
            InterventionSet::from_mechanisms([f, f]),
            Err(Error::Duplicate(k)) if k == "interventions.firewalls"
        ));
        let set = InterventionSet::from_mechanisms([f]).unwrap();
        assert!(set.firewalls.is_some());
    }

    #[test]
    fn ranges_checked() {
        let mut set = full(0.0);
        set.irreducible_deliberation.as_mut().unwrap().d_cap = 1.0;
        assert!(set.validate().is_err());
        let mut set = full(0.0);
        set.nested_forums.as_mut().unwrap().m_forum = 0.5;
        assert!(set.validate().is_err());
        let mut set = full(0.0);
        set.firewalls.as_mut().unwrap().active_from = -1.0;
        assert!(set.validate().is_err());
    }

    #[test]
    fn cap_examples() {
        let mut p = ModelParams::default();
        p.d_cap = 1.0;
        assert_eq!(delegation_cap(0.9, &p), 0.9);
        p.d_cap = 0.6;
        assert_eq!(delegation_cap(0.9, &p), 0.6);
        assert_eq!(delegation_cap(0.3, &p), 0.3);
    }
}
