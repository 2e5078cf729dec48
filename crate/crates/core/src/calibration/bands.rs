//! Search over calibration knobs so the built-in scenarios land inside
//! target bands.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    crossing_year_of, divergence_at, estimate_reversibility_threshold, monte_carlo_band,
    ParamIntervals, ThresholdOutcome, THRESHOLD_BRACKET, THRESHOLD_TOL,
};
use crate::calibration::fit::FitResult;
use crate::error::{Error, Result};
use crate::scenarios::{Calibration, DivergenceArm};

/// Quantity a band constrains, evaluated on the scenarios generated from a
/// calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "metric", rename_all = "snake_case")]
pub enum Metric {
    /// Economic-domain crossing year; a run that never crosses counts as
    /// its horizon.
    CrossingYear { scenario: String },
    /// Monte Carlo mean crossing year over the shipped intervals.
    BandMean { scenario: String, n: usize, seed: u64 },
    /// Share of Monte Carlo draws that cross within the horizon.
    CrossingFraction { scenario: String, n: usize, seed: u64 },
    /// Economic-domain welfare divergence of one arm at `year`.
    Divergence { arm: String, year: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandTarget {
    pub metric: Metric,
    pub lo: f64,
    pub hi: f64,
}

impl BandTarget {
    pub fn new(metric: Metric, lo: f64, hi: f64) -> Self {
        Self { metric, lo, hi }
    }

    pub fn name(&self) -> String {
        match &self.metric {
            Metric::CrossingYear { scenario } => format!("crossing_year[{scenario}]"),
            Metric::BandMean { scenario, .. } => format!("band_mean[{scenario}]"),
            Metric::CrossingFraction { scenario, .. } => format!("crossing_fraction[{scenario}]"),
            Metric::Divergence { arm, year } => format!("divergence[{arm}@{year}]"),
        }
    }

    /// Distance from `value` to the band; zero inside it.
    pub fn violation(&self, value: f64) -> f64 {
        (self.lo - value).max(0.0) + (value - self.hi).max(0.0)
    }

    pub fn evaluate(&self, cal: &Calibration) -> Result<f64> {
        match &self.metric {
            Metric::CrossingYear { scenario } => {
                let cfg = cal.scenario(scenario)?;
                Ok(crossing_year_of(&cfg, cal.c_bar_ref, 0)?.unwrap_or(cfg.horizon_years))
            }
            Metric::BandMean { scenario, n, seed } => {
                let cfg = cal.scenario(scenario)?;
                Ok(monte_carlo_band(&cfg, &ParamIntervals::shipped(), *n, *seed)?.mean)
            }
            Metric::CrossingFraction { scenario, n, seed } => {
                let cfg = cal.scenario(scenario)?;
                Ok(monte_carlo_band(&cfg, &ParamIntervals::shipped(), *n, *seed)?.crossing_fraction())
            }
            Metric::Divergence { arm, year } => {
                let arm = DivergenceArm::ALL
                    .into_iter()
                    .find(|a| a.label() == arm)
                    .ok_or_else(|| Error::UnknownScenario(arm.clone()))?;
                divergence_at(&cal.divergence_arm(arm), *year, 0)
            }
        }
    }
}

/// The targets every shipped calibration must meet.
pub fn shipped_targets() -> Vec<BandTarget> {
    let cy = |s: &str| Metric::CrossingYear { scenario: s.into() };
    let mean = |s: &str| Metric::BandMean {
        scenario: s.into(),
        n: 200,
        seed: 7,
    };
    let frac = |s: &str| Metric::CrossingFraction {
        scenario: s.into(),
        n: 200,
        seed: 7,
    };
    let div = |a: DivergenceArm| Metric::Divergence {
        arm: a.label().into(),
        year: crate::scenarios::DIVERGENCE_YEAR,
    };
    vec![
        BandTarget::new(cy("baseline"), 15.0, 20.0),
        BandTarget::new(cy("conservative"), 40.0, 50.0),
        BandTarget::new(cy("aggressive"), 8.0, 12.0),
        BandTarget::new(mean("baseline"), 15.0, 21.0),
        BandTarget::new(mean("std-mitigation"), 21.0, 29.0),
        BandTarget::new(mean("decoupled"), 33.0, 43.0),
        BandTarget::new(frac("std-mitigation"), 0.95, 1.0),
        BandTarget::new(frac("full-architecture"), 0.0, 0.05),
        BandTarget::new(div(DivergenceArm::LockedIn), 0.66, 0.70),
        BandTarget::new(div(DivergenceArm::NestedForums), 0.20, 0.30),
        BandTarget::new(div(DivergenceArm::ContinuousDeliberation), 0.0, 0.10),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Knob {
    Gamma,
    RhoR,
    Coupling,
    SalienceSlope,
    Mu,
    SigmaW,
    StdDeltaFactor,
    ADec,
    DCap,
    AlphaFactor,
    MForum,
}

impl Knob {
    pub const ALL: [Knob; 11] = [
        Knob::Gamma,
        Knob::RhoR,
        Knob::Coupling,
        Knob::SalienceSlope,
        Knob::Mu,
        Knob::SigmaW,
        Knob::StdDeltaFactor,
        Knob::ADec,
        Knob::DCap,
        Knob::AlphaFactor,
        Knob::MForum,
    ];

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::out_of_range("knob", format!("unknown knob `{name}`")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Knob::Gamma => "gamma",
            Knob::RhoR => "rho_r",
            Knob::Coupling => "coupling",
            Knob::SalienceSlope => "salience_slope",
            Knob::Mu => "mu",
            Knob::SigmaW => "sigma_w",
            Knob::StdDeltaFactor => "std_delta_factor",
            Knob::ADec => "a_dec",
            Knob::DCap => "d_cap",
            Knob::AlphaFactor => "alpha_factor",
            Knob::MForum => "m_forum",
        }
    }

    pub fn get(self, cal: &Calibration) -> f64 {
        match self {
            Knob::Gamma => cal.gamma,
            Knob::RhoR => cal.rho_r,
            Knob::Coupling => cal.coupling,
            Knob::SalienceSlope => cal.salience_slope,
            Knob::Mu => cal.mu,
            Knob::SigmaW => cal.sigma_w,
            Knob::StdDeltaFactor => cal.std_delta_factor,
            Knob::ADec => cal.a_dec,
            Knob::DCap => cal.d_cap,
            Knob::AlphaFactor => cal.alpha_factor,
            Knob::MForum => cal.m_forum,
        }
    }

    pub fn set(self, cal: &mut Calibration, v: f64) {
        match self {
            Knob::Gamma => cal.gamma = v,
            Knob::RhoR => cal.rho_r = v,
            Knob::Coupling => cal.coupling = v,
            Knob::SalienceSlope => cal.salience_slope = v,
            Knob::Mu => cal.mu = v,
            Knob::SigmaW => cal.sigma_w = v,
            Knob::StdDeltaFactor => cal.std_delta_factor = v,
            Knob::ADec => cal.a_dec = v,
            Knob::DCap => cal.d_cap = v,
            Knob::AlphaFactor => cal.alpha_factor = v,
            Knob::MForum => cal.m_forum = v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnobRange {
    pub knob: Knob,
    pub lo: f64,
    pub hi: f64,
}

impl KnobRange {
    pub fn new(knob: Knob, lo: f64, hi: f64) -> Self {
        Self { knob, lo, hi }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetValue {
    pub target: String,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandFit {
    /// Knob values, total violation as `rss`, evaluations as `iterations`;
    /// `converged` means every band is met.
    pub result: FitResult,
    pub calibration: Calibration,
    pub values: Vec<TargetValue>,
}

impl BandFit {
    pub fn violating(&self) -> Vec<&TargetValue> {
        self.values.iter().filter(|v| v.violation > 0.0).collect()
    }
}

fn score(cal: &Calibration, targets: &[BandTarget]) -> Result<(f64, Vec<TargetValue>)> {
    let mut total = 0.0;
    let mut values = Vec::with_capacity(targets.len());
    for t in targets {
        let value = t.evaluate(cal)?;
        let violation = t.violation(value);
        total += violation;
        values.push(TargetValue {
            target: t.name(),
            value,
            lo: t.lo,
            hi: t.hi,
            violation,
        });
    }
    Ok((total, values))
}

/// Calibration with `values` applied; the crossing reference is re-estimated
/// when `gamma` moves since it sets the basin boundary.
fn apply(start: &Calibration, knobs: &[KnobRange], values: &[f64]) -> Result<Calibration> {
    let mut cal = start.clone();
    for (k, v) in knobs.iter().zip(values) {
        k.knob.set(&mut cal, *v);
    }
    if knobs.iter().any(|k| k.knob == Knob::Gamma) && cal.gamma != start.gamma {
        let (lo, hi) = THRESHOLD_BRACKET;
        match estimate_reversibility_threshold(&cal.baseline_params(), lo, hi, THRESHOLD_TOL)? {
            ThresholdOutcome::Bistable(r) => cal.c_bar_ref = r.c_bar,
            ThresholdOutcome::Monostable(_) => {
                return Err(Error::Config("baseline lost its threshold".into()))
            }
        }
    }
    cal.baseline_params().validate()?;
    Ok(cal)
}

/// Minimizes the summed band violation over `knobs`, starting from `start`:
/// a five-point sweep of each knob in turn, then coordinate pattern search,
/// stopping as soon as every band is met or `budget` evaluations are spent.
/// Knob settings that make the model invalid count as infinitely bad.
pub fn calibrate_to_bands(
    start: &Calibration,
    targets: &[BandTarget],
    knobs: &[KnobRange],
    budget: usize,
) -> Result<BandFit> {
    for (i, k) in knobs.iter().enumerate() {
        if !(k.lo.is_finite() && k.hi.is_finite() && k.lo <= k.hi) {
            return Err(Error::out_of_range(k.knob.name(), format!("invalid range [{}, {}]", k.lo, k.hi)));
        }
        if knobs[..i].iter().any(|o| o.knob == k.knob) {
            return Err(Error::Duplicate(k.knob.name().to_string()));
        }
    }
    let evaluations = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| -> Result<f64> {
        evaluations.set(evaluations.get() + 1);
        match apply(start, knobs, x) {
            Ok(cal) => Ok(score(&cal, targets)?.0),
            Err(e) if e.is_config() => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    };

    let mut x: Vec<f64> = knobs.iter().map(|k| k.knob.get(start).clamp(k.lo, k.hi)).collect();
    let mut best = eval(&x)?;

    'sweep: for k in 0..knobs.len() {
        for i in 0..5 {
            if best == 0.0 || evaluations.get() >= budget {
                break 'sweep;
            }
            let mut cand = x.clone();
            cand[k] = knobs[k].lo + (knobs[k].hi - knobs[k].lo) * i as f64 / 4.0;
            if cand[k] == x[k] {
                continue;
            }
            let r = eval(&cand)?;
            if r < best {
                best = r;
                x = cand;
            }
        }
    }

    let mut step: Vec<f64> = knobs.iter().map(|k| (k.hi - k.lo) / 8.0).collect();
    while best > 0.0 && evaluations.get() < budget && step.iter().zip(knobs).any(|(s, k)| *s > 1e-9 * (k.hi - k.lo)) {
        let mut improved = false;
        'poll: for k in 0..x.len() {
            for sign in [1.0, -1.0] {
                if evaluations.get() >= budget {
                    break 'poll;
                }
                let mut cand = x.clone();
                cand[k] = (x[k] + sign * step[k]).clamp(knobs[k].lo, knobs[k].hi);
                if cand[k] == x[k] {
                    continue;
                }
                let r = eval(&cand)?;
                if r < best {
                    best = r;
                    x = cand;
                    improved = true;
                    break 'poll;
                }
            }
        }
        if !improved {
            for s in &mut step {
                *s *= 0.5;
            }
        }
    }

    let calibration = apply(start, knobs, &x)?;
    let (total, values) = score(&calibration, targets)?;
    let params: BTreeMap<String, f64> = knobs
        .iter()
        .zip(&x)
        .map(|(k, v)| (k.knob.name().to_string(), *v))
        .collect();
    Ok(BandFit {
        result: FitResult {
            params,
            rss: total,
            iterations: evaluations.get(),
            converged: total == 0.0,
        },
        calibration,
        values,
    })
}
