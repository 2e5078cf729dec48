//! Built-in scenarios and the calibration knobs they are generated from.
//!
//! The shipped scenario files under `scenarios/` are the frozen output of
//! [`Calibration::frozen`]; they are embedded in the binary so that running a
//! built-in scenario needs no files on disk.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interventions::{
    DecoupledStreams, Firewalls, InterventionSet, IrreducibleDeliberation, NestedForums,
    StdMitigation,
};
use crate::model::{uniform_coupling, ModelParams, SalienceSchedule, SystemState};
use crate::report::config::{parse_scenario, ScenarioConfig};

pub const BASELINE_DELTA: f64 = 0.08;
pub const BASELINE_ALPHA: f64 = 0.09;
pub const CONSERVATIVE_DELTA: f64 = 0.03;
pub const CONSERVATIVE_ALPHA: f64 = 0.02;
pub const AGGRESSIVE_DELTA: f64 = 0.15;
pub const AGGRESSIVE_ALPHA: f64 = 0.15;

/// Year at which divergence arms are compared (2026 -> 2050).
pub const DIVERGENCE_YEAR: f64 = 24.0;

/// Built-in scenario ids, in listing order.
pub const BUILTIN_IDS: [&str; 6] = [
    "baseline",
    "conservative",
    "aggressive",
    "std-mitigation",
    "decoupled",
    "full-architecture",
];

const EMBEDDED: [(&str, &str); 6] = [
    ("baseline", include_str!("../scenarios/baseline.json")),
    ("conservative", include_str!("../scenarios/conservative.json")),
    ("aggressive", include_str!("../scenarios/aggressive.json")),
    ("std-mitigation", include_str!("../scenarios/std-mitigation.json")),
    ("decoupled", include_str!("../scenarios/decoupled.json")),
    ("full-architecture", include_str!("../scenarios/full-architecture.json")),
];

/// Embedded frozen calibration record.
pub const FROZEN_CALIBRATION_JSON: &str = include_str!("../scenarios/calibration.json");

/// Free knobs of the model that are not pinned by literature values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub gamma: f64,
    pub rho_r: f64,
    /// Off-diagonal spillover weight.
    pub coupling: f64,
    pub salience_start: f64,
    /// Yearly increase of the salience baseline.
    pub salience_slope: f64,
    /// Last year of the salience ramp; the level is held afterwards.
    pub salience_years: u32,
    pub theta_use: f64,
    /// Initial capacity in every domain.
    pub c0: f64,
    pub rho_v: f64,
    pub mu: f64,
    pub sigma_w: f64,
    pub dt: f64,
    pub horizon_years: f64,
    pub std_delta_factor: f64,
    pub a_dec: f64,
    pub d_cap: f64,
    pub alpha_factor: f64,
    pub m_forum: f64,
    /// Reversibility threshold of the baseline, used as the crossing
    /// reference by every built-in scenario.
    pub c_bar_ref: f64,
}

impl Calibration {
    /// The committed calibration.
    pub fn frozen() -> Self {
        Self {
            gamma: 5.0,
            rho_r: 0.06,
            coupling: 1.0,
            salience_start: 1.0,
            salience_slope: 0.1,
            salience_years: 80,
            theta_use: 0.5,
            c0: 1.0,
            rho_v: 1.0,
            mu: 0.1,
            // 1 - exp(-24 / sigma_w) = 0.68
            sigma_w: 21.063_083_983_082_556,
            dt: 0.25,
            horizon_years: 60.0,
            std_delta_factor: 0.6,
            a_dec: 0.02,
            d_cap: 0.4,
            alpha_factor: 0.5,
            m_forum: 12.0,
            c_bar_ref: 0.2,
        }
    }

    pub fn schedule(&self) -> SalienceSchedule {
        SalienceSchedule::linear_ramp(self.salience_start, self.salience_slope, self.salience_years)
            .expect("calibrated ramp is nonnegative")
    }

    pub fn params(&self, delta: f64, alpha: f64) -> ModelParams {
        ModelParams {
            delta,
            alpha,
            gamma: self.gamma,
            theta_use: self.theta_use,
            kappa_l: 0.0,
            rho_r: self.rho_r,
            a_dec: 0.0,
            c_max: 1.0,
            coupling: uniform_coupling(self.coupling),
            rho_v: self.rho_v,
            mu: self.mu,
            m_forum: 1.0,
            sigma_w: self.sigma_w,
            d_cap: 1.0,
            salience_schedule: self.schedule(),
            dt: self.dt,
        }
    }

    pub fn baseline_params(&self) -> ModelParams {
        self.params(BASELINE_DELTA, BASELINE_ALPHA)
    }

    pub fn std_mitigation(&self) -> StdMitigation {
        StdMitigation {
            active_from: 0.0,
            delta_factor: self.std_delta_factor,
        }
    }

    pub fn decoupled_streams(&self) -> DecoupledStreams {
        DecoupledStreams {
            active_from: 0.0,
            a_dec: self.a_dec,
        }
    }

    pub fn irreducible_deliberation(&self) -> IrreducibleDeliberation {
        IrreducibleDeliberation {
            active_from: 0.0,
            d_cap: self.d_cap,
            alpha_factor: self.alpha_factor,
        }
    }

    pub fn nested_forums(&self) -> NestedForums {
        NestedForums {
            active_from: 0.0,
            m_forum: self.m_forum,
        }
    }

    pub fn interventions(&self, arm: Arm) -> InterventionSet {
        let mut set = InterventionSet::none();
        if matches!(arm, Arm::StdMitigation | Arm::Decoupled | Arm::Full) {
            set.std_mitigation = Some(self.std_mitigation());
        }
        if matches!(arm, Arm::Decoupled | Arm::Full) {
            set.decoupled_streams = Some(self.decoupled_streams());
        }
        if arm == Arm::Full {
            set.irreducible_deliberation = Some(self.irreducible_deliberation());
            set.nested_forums = Some(self.nested_forums());
            set.firewalls = Some(Firewalls { active_from: 0.0 });
        }
        set
    }

    fn config(&self, id: &str, description: &str, delta: f64, alpha: f64, arm: Arm) -> ScenarioConfig {
        let params = self.params(delta, alpha);
        let initial = SystemState::uniform(self.c0, &params).expect("calibrated state is valid");
        ScenarioConfig {
            id: id.to_string(),
            description: description.to_string(),
            params,
            interventions: self.interventions(arm),
            initial,
            horizon_years: self.horizon_years,
            c_bar_ref: Some(self.c_bar_ref),
        }
    }

    /// Generates one of the built-in scenarios.
    pub fn scenario(&self, id: &str) -> Result<ScenarioConfig> {
        let (b_d, b_a) = (BASELINE_DELTA, BASELINE_ALPHA);
        let cfg = match id {
            "baseline" => self.config(id, "Middle estimate, no interventions", b_d, b_a, Arm::None),
            "conservative" => self.config(
                id,
                "Slowest erosion, no interventions",
                CONSERVATIVE_DELTA,
                CONSERVATIVE_ALPHA,
                Arm::None,
            ),
            "aggressive" => self.config(
                id,
                "Fastest erosion, no interventions",
                AGGRESSIVE_DELTA,
                AGGRESSIVE_ALPHA,
                Arm::None,
            ),
            "std-mitigation" => self.config(
                id,
                "Baseline with contestability registers and impact floors",
                b_d,
                b_a,
                Arm::StdMitigation,
            ),
            "decoupled" => self.config(
                id,
                "Standard mitigation plus decoupled capacity streams",
                b_d,
                b_a,
                Arm::Decoupled,
            ),
            "full-architecture" => self.config(
                id,
                "All five mechanisms: mitigation, decoupled streams, irreducible deliberation, nested forums, firewalls",
                b_d,
                b_a,
                Arm::Full,
            ),
            other => return Err(Error::UnknownScenario(other.to_string())),
        };
        Ok(cfg)
    }

    pub fn all_scenarios(&self) -> Vec<ScenarioConfig> {
        BUILTIN_IDS
            .iter()
            .map(|id| self.scenario(id).expect("built-in id"))
            .collect()
    }

    /// Scenario used for one welfare-divergence arm.
    pub fn divergence_arm(&self, arm: DivergenceArm) -> ScenarioConfig {
        match arm {
            DivergenceArm::LockedIn => {
                let mut cfg = self.scenario("baseline").expect("built-in");
                cfg.id = "locked-in".into();
                cfg.description = "Baseline with encoded values frozen (mu = 0)".into();
                cfg.params.mu = 0.0;
                cfg
            }
            DivergenceArm::NestedForums => {
                let mut cfg = self.scenario("baseline").expect("built-in");
                cfg.id = "nested-forums".into();
                cfg.description = "Baseline with nested value forums only".into();
                cfg.interventions.nested_forums = Some(self.nested_forums());
                cfg
            }
            DivergenceArm::ContinuousDeliberation => {
                let mut cfg = self.scenario("full-architecture").expect("built-in");
                cfg.id = "continuous-deliberation".into();
                cfg
            }
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("calibration serializes");
        s.push('\n');
        s
    }
}

/// Intervention arms of the built-in scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    None,
    StdMitigation,
    /// Standard mitigation plus decoupled streams.
    Decoupled,
    /// All five mechanisms.
    Full,
}

/// Arms of the welfare-divergence comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceArm {
    /// Baseline dynamics with `mu = 0`.
    LockedIn,
    /// Baseline dynamics with nested value forums.
    NestedForums,
    /// Full architecture: forums plus preserved capacity.
    ContinuousDeliberation,
}

impl DivergenceArm {
    pub const ALL: [DivergenceArm; 3] = [
        DivergenceArm::LockedIn,
        DivergenceArm::NestedForums,
        DivergenceArm::ContinuousDeliberation,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DivergenceArm::LockedIn => "locked-in",
            DivergenceArm::NestedForums => "nested-forums",
            DivergenceArm::ContinuousDeliberation => "continuous-deliberation",
        }
    }
}

/// Parses an embedded built-in scenario by id.
pub fn builtin(id: &str) -> Result<ScenarioConfig> {
    EMBEDDED
        .iter()
        .find(|(k, _)| *k == id)
        .map(|(_, text)| parse_scenario(text))
        .unwrap_or_else(|| Err(Error::UnknownScenario(id.to_string())))
}

/// The embedded calibration record.
pub fn frozen_calibration() -> Calibration {
    serde_json::from_str(FROZEN_CALIBRATION_JSON).expect("embedded calibration parses")
}

/// Resolves either a built-in id or a path to a scenario JSON file.
pub fn resolve(id_or_path: &str) -> Result<ScenarioConfig> {
    if BUILTIN_IDS.contains(&id_or_path) {
        return builtin(id_or_path);
    }
    let path = std::path::Path::new(id_or_path);
    if path.extension().is_some_and(|e| e == "json") || path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {id_or_path}: {e}")))?;
        return parse_scenario(&text);
    }
    Err(Error::UnknownScenario(id_or_path.to_string()))
}
