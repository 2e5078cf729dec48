//! Summary JSON, schema version 1.
//!
//! Layout: `{"schema":1,"reports":[...]}` where each report carries a `kind`
//! tag. Keys follow struct field order, every field is always written, and a
//! missing crossing is an explicit `null` next to a reason string.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::{BandResult, Fate, SweepResult, ThresholdOutcome};
use crate::error::{Error, Result};
use crate::model::{Domain, Trajectory, DOMAINS};

pub const SUMMARY_SCHEMA: u32 = 1;

pub fn no_crossing_reason(horizon_years: f64) -> String {
    format!("none within horizon ({horizon_years} years)")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub domain: String,
    pub year: Option<f64>,
    pub reason: Option<String>,
}

impl Crossing {
    pub fn new(domain: impl Into<String>, year: Option<f64>, horizon_years: f64) -> Self {
        Self {
            domain: domain.into(),
            year,
            reason: year.is_none().then(|| no_crossing_reason(horizon_years)),
        }
    }
}

/// Outcome of a single scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub c_bar: f64,
    pub horizon_years: f64,
    pub crossings: Vec<Crossing>,
    pub final_capacity: [f64; DOMAINS],
    pub final_divergence: [f64; DOMAINS],
}

impl RunReport {
    /// Summarizes a trajectory whose crossings have been filled in.
    pub fn from_trajectory(scenario: &str, c_bar: f64, horizon_years: f64, traj: &Trajectory) -> Self {
        let last = traj.last();
        Self {
            scenario: scenario.to_string(),
            c_bar,
            horizon_years,
            crossings: Domain::ALL
                .iter()
                .map(|d| Crossing::new(d.name(), traj.crossing_year[d.index()], horizon_years))
                .collect(),
            final_capacity: last.state.domains.map(|d| d.c),
            final_divergence: last.divergence,
        }
    }

    /// Economic-domain crossing year.
    pub fn crossing_year(&self) -> Option<f64> {
        self.crossings.first().and_then(|c| c.year)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSummary {
    pub scenario: String,
    /// `bistable` or `monostable`.
    pub outcome: String,
    pub c_bar: Option<f64>,
    pub basin_low: Option<f64>,
    pub basin_high: Option<f64>,
    pub tolerance: f64,
    pub probes: usize,
    pub method: String,
    /// Shared fate of every start when monostable.
    pub fate: Option<Fate>,
    pub reason: Option<String>,
}

impl ThresholdSummary {
    pub fn new(scenario: &str, tolerance: f64, outcome: &ThresholdOutcome) -> Self {
        match outcome {
            ThresholdOutcome::Bistable(r) => Self {
                scenario: scenario.to_string(),
                outcome: "bistable".into(),
                c_bar: Some(r.c_bar),
                basin_low: Some(r.basin_low),
                basin_high: Some(r.basin_high),
                tolerance,
                probes: r.probes,
                method: r.method.clone(),
                fate: None,
                reason: None,
            },
            ThresholdOutcome::Monostable(f) => Self {
                scenario: scenario.to_string(),
                outcome: "monostable".into(),
                c_bar: None,
                basin_low: None,
                basin_high: None,
                tolerance,
                probes: 0,
                method: "bisection".into(),
                fate: Some(*f),
                reason: Some(format!("every initial capacity in the bracket {f:?}").to_lowercase()),
            },
        }
    }
}

/// Sweep grid in compact form: `crossing_years[i][j]` belongs to
/// `delta_values[i]`, `alpha_values[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub scenario: String,
    pub c_bar: f64,
    pub horizon_years: f64,
    pub delta_values: Vec<f64>,
    pub alpha_values: Vec<f64>,
    pub crossing_years: Vec<Vec<Option<f64>>>,
    /// Meaning of a `null` cell.
    pub reason: String,
}

impl From<&SweepResult> for SweepSummary {
    fn from(r: &SweepResult) -> Self {
        let na = r.alpha_values.len();
        Self {
            scenario: r.scenario.clone(),
            c_bar: r.c_bar,
            horizon_years: r.horizon_years,
            delta_values: r.delta_values.clone(),
            alpha_values: r.alpha_values.clone(),
            crossing_years: r
                .cells
                .chunks(na.max(1))
                .map(|row| row.iter().map(|c| c.crossing_year).collect())
                .collect(),
            reason: format!("null = {}", no_crossing_reason(r.horizon_years)),
        }
    }
}

/// Economic-domain crossing years of several scenarios, in the order given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub scenario: String,
    pub c_bar: f64,
    pub crossing: Crossing,
}

/// Parameter fit or band calibration outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub target: String,
    pub params: BTreeMap<String, f64>,
    pub rss: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Report {
    Run(RunReport),
    Threshold(ThresholdSummary),
    Band(BandResult),
    Sweep(SweepSummary),
    Compare(CompareReport),
    Fit(FitReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema: u32,
    pub reports: Vec<Report>,
}

pub fn write_summary_json(reports: &[Report]) -> String {
    #[derive(Serialize)]
    struct Out<'a> {
        schema: u32,
        reports: &'a [Report],
    }
    serde_json::to_string(&Out {
        schema: SUMMARY_SCHEMA,
        reports,
    })
    .expect("summary values are finite")
}

pub fn parse_summary_json(text: &str) -> Result<Summary> {
    let s: Summary = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if s.schema != SUMMARY_SCHEMA {
        return Err(Error::Config(format!(
            "unsupported summary schema {}, expected {SUMMARY_SCHEMA}",
            s.schema
        )));
    }
    Ok(s)
}
