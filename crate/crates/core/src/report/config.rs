//! JSON scenario configs.
//!
//! ```json
//! {
//!   "id": "baseline",
//!   "description": "...",
//!   "params": { "delta": 0.08, "alpha": 0.09, ... },
//!   "interventions": { "std_mitigation": { "active_from": 0, "delta_factor": 0.6 } },
//!   "initial": { "t": 0, "domains": [ {"c":1,"s":1,"d":0.17,"u":0,"v_e":0}, ... ], "v_h": 0 },
//!   "horizon_years": 60,
//!   "c_bar_ref": 0.2
//! }
//! ```
//!
//! Every key except `id` may be omitted. Missing `params` keys take the
//! baseline calibration, a missing `initial` starts every domain at capacity
//! 1 on the schedule's t = 0 salience, `horizon_years` defaults to 60 and a
//! missing `c_bar_ref` means "estimate the threshold from these params".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interventions::InterventionSet;
use crate::model::{ModelParams, SystemState};

pub const DEFAULT_HORIZON_YEARS: f64 = 60.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub id: String,
    pub description: String,
    pub params: ModelParams,
    pub interventions: InterventionSet,
    pub initial: SystemState,
    pub horizon_years: f64,
    pub c_bar_ref: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    id: String,
    #[serde(default)]
    description: String,
    #[serde(default)]
    params: ModelParams,
    #[serde(default)]
    interventions: InterventionSet,
    #[serde(default)]
    initial: Option<SystemState>,
    #[serde(default)]
    horizon_years: Option<f64>,
    #[serde(default)]
    c_bar_ref: Option<f64>,
}

fn map_serde_error(e: serde_json::Error) -> Error {
    use serde_json::error::Category;
    let (line, column) = (e.line(), e.column());
    let msg = e.to_string();
    match e.classify() {
        Category::Syntax | Category::Eof | Category::Io => Error::Syntax {
            line,
            column,
            message: msg,
        },
        Category::Data => {
            if let Some(key) = quoted_after(&msg, "unknown field `") {
                Error::UnknownKey { key, line, column }
            } else if let Some(key) = quoted_after(&msg, "duplicate field `") {
                Error::Duplicate(key)
            } else {
                Error::Config(msg)
            }
        }
    }
}

fn quoted_after(msg: &str, prefix: &str) -> Option<String> {
    let rest = &msg[msg.find(prefix)? + prefix.len()..];
    Some(rest[..rest.find('`')?].to_string())
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::out_of_range("id", "must be non-empty"));
        }
        self.params.validate()?;
        self.interventions.validate()?;
        self.initial.validate()?;
        if crate::model::params::whole_steps(self.horizon_years, self.params.dt).is_none() {
            return Err(Error::out_of_range(
                "horizon_years",
                "must be > 0 and a whole multiple of dt",
            ));
        }
        if let Some(c) = self.c_bar_ref {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::out_of_range("c_bar_ref", "must be finite and > 0"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// Copy with a different integration step.
    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        let mut out = self.clone();
        out.params.dt = dt;
        out.validate()?;
        Ok(out)
    }
}

/// Strict parse: syntax errors carry line/column, unknown keys are named,
/// values are range-checked.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let raw: RawScenario = serde_json::from_str(text).map_err(map_serde_error)?;
    raw.params.validate()?;
    let initial = match raw.initial {
        Some(s) => s,
        None => SystemState::uniform(1.0, &raw.params)?,
    };
    let cfg = ScenarioConfig {
        id: raw.id,
        description: raw.description,
        params: raw.params,
        interventions: raw.interventions,
        initial,
        horizon_years: raw.horizon_years.unwrap_or(DEFAULT_HORIZON_YEARS),
        c_bar_ref: raw.c_bar_ref,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = parse_scenario(r#"{"id": "m"}"#).unwrap();
        assert_eq!(cfg.params, ModelParams::default());
        assert_eq!(cfg.horizon_years, DEFAULT_HORIZON_YEARS);
        assert!(cfg.interventions.is_empty());
        assert_eq!(cfg.c_bar_ref, None);
        assert_eq!(cfg.initial, SystemState::uniform(1.0, &cfg.params).unwrap());
    }

    #[test]
    fn out_of_range_names_key() {
        let err = parse_scenario(r#"{"id": "x", "params": {"delta": 1.5}}"#).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { ref key, .. } if key == "delta"), "{err}");
        let err = parse_scenario(r#"{"id": "x", "horizon_years": 10.1}"#).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { ref key, .. } if key == "horizon_years"));
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_scenario("{\"id\": \"x\",\n \"params\": {\"detla\": 0.1}}").unwrap_err();
        match err {
            Error::UnknownKey { key, line, .. } => {
                assert_eq!(key, "detla");
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_scenario(r#"{"id": "x", "extra": 1}"#).unwrap_err();
        assert!(matches!(err, Error::UnknownKey { ref key, .. } if key == "extra"));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_scenario("{\n  \"id\": \"x\",\n  \"horizon_years\": ,\n}").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn duplicate_mechanism_rejected() {
        let text = r#"{"id": "x", "interventions": {
            "firewalls": {"active_from": 0},
            "firewalls": {"active_from": 3}}}"#;
        assert!(matches!(parse_scenario(text), Err(Error::Duplicate(k)) if k == "firewalls"));
    }

    #[test]
    fn round_trip() {
        let cfg = parse_scenario(r#"{"id": "m", "c_bar_ref": 0.25,
            "interventions": {"nested_forums": {"active_from": 2, "m_forum": 3}}}"#)
        .unwrap();
        let again = parse_scenario(&cfg.to_json()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_json(), cfg.to_json());
    }
}
