use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interventions::InterventionSet;
use crate::model::simulate::run_to_end;
use crate::model::{ModelParams, SystemState, DOMAINS};

/// Long-run outcome of a trajectory started at some initial capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fate {
    Decayed,
    Persisted,
}

/// Horizon and cutoff used to classify a long-run fate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FateProbe {
    pub horizon_years: f64,
    /// Capacity below which a run counts as decayed.
    pub eps: f64,
}

impl Default for FateProbe {
    fn default() -> Self {
        Self {
            horizon_years: 300.0,
            eps: 1e-3,
        }
    }
}

/// Basin boundary in initial capacity between the collapsed and the
/// persisting attractor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub c_bar: f64,
    /// Final bracket: `basin_low` decays, `basin_high` persists.
    pub basin_low: f64,
    pub basin_high: f64,
    pub crossing_year: [Option<f64>; DOMAINS],
    pub method: String,
    pub tolerance: f64,
    /// Bisection probes spent (endpoint checks excluded).
    pub probes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdOutcome {
    Bistable(ThresholdReport),
    /// Both bracket ends share one fate: no threshold to report.
    Monostable(Fate),
}

impl ThresholdOutcome {
    pub fn report(&self) -> Option<&ThresholdReport> {
        match self {
            ThresholdOutcome::Bistable(r) => Some(r),
            ThresholdOutcome::Monostable(_) => None,
        }
    }
}

/// Fate of a single-domain autonomous run from capacity `c0`: no coupling,
/// salience frozen at its t = 0 level and no lock-in feedback, whatever
/// `params` says about those.
pub fn long_run_fate(c0: f64, params: &ModelParams, probe: FateProbe) -> Result<Fate> {
    let p = params.autonomous();
    let init = SystemState::uniform(c0, &p)?;
    let end = run_to_end(&init, &p, &InterventionSet::none(), probe.horizon_years)?;
    Ok(if end.domains[0].c < probe.eps {
        Fate::Decayed
    } else {
        Fate::Persisted
    })
}

/// Bisection on initial capacity for any fate oracle.
///
/// Requires `fate(c_lo) = Decayed` and `fate(c_hi) = Persisted`; equal fates
/// yield [`ThresholdOutcome::Monostable`], an inverted bracket is an error.
/// Spends `ceil(log2((c_hi - c_lo) / tol))` probes.
pub fn bisect_basin_boundary<F>(mut fate: F, c_lo: f64, c_hi: f64, tol: f64) -> Result<ThresholdOutcome>
where
    F: FnMut(f64) -> Result<Fate>,
{
    if !(c_lo.is_finite() && c_hi.is_finite() && c_lo >= 0.0 && c_lo < c_hi) {
        return Err(Error::Config(format!(
            "bracket must satisfy 0 <= c_lo < c_hi, got [{c_lo}, {c_hi}]"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be > 0, got {tol}")));
    }
    let f_lo = fate(c_lo)?;
    let f_hi = fate(c_hi)?;
    if f_lo == f_hi {
        return Ok(ThresholdOutcome::Monostable(f_lo));
    }
    if f_lo == Fate::Persisted {
        return Err(Error::Config(format!(
            "inverted bracket: c_lo = {c_lo} persists while c_hi = {c_hi} decays"
        )));
    }

    let (mut lo, mut hi) = (c_lo, c_hi);
    let mut probes = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        probes += 1;
        match fate(mid)? {
            Fate::Decayed => lo = mid,
            Fate::Persisted => hi = mid,
        }
    }
    Ok(ThresholdOutcome::Bistable(ThresholdReport {
        c_bar: 0.5 * (lo + hi),
        basin_low: lo,
        basin_high: hi,
        crossing_year: [None; DOMAINS],
        method: "bisection".to_string(),
        tolerance: tol,
        probes,
    }))
}

/// Reversibility threshold of `params` under the default fate probe.
pub fn estimate_reversibility_threshold(
    params: &ModelParams,
    c_lo: f64,
    c_hi: f64,
    tol: f64,
) -> Result<ThresholdOutcome> {
    estimate_reversibility_threshold_with(params, c_lo, c_hi, tol, FateProbe::default())
}

pub fn estimate_reversibility_threshold_with(
    params: &ModelParams,
    c_lo: f64,
    c_hi: f64,
    tol: f64,
    probe: FateProbe,
) -> Result<ThresholdOutcome> {
    params.validate()?;
    bisect_basin_boundary(|c| long_run_fate(c, params, probe), c_lo, c_hi, tol)
}
