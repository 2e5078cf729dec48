use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DOMAINS;

/// Piecewise-constant yearly salience baseline, one level per domain.
///
/// Each point `(year, levels)` holds from `year` until the next point; the
/// last point holds forever. The first point must sit at year 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, [f64; DOMAINS])>", into = "Vec<(f64, [f64; DOMAINS])>")]
pub struct SalienceSchedule {
    points: Vec<(f64, [f64; DOMAINS])>,
}

// Absorbs float noise in t = k * dt when looking up integer year boundaries.
const YEAR_EPS: f64 = 1e-9;

impl SalienceSchedule {
    pub fn new(points: Vec<(f64, [f64; DOMAINS])>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::out_of_range(
                "salience_schedule",
                "schedule needs at least one point",
            ));
        }
        for (i, (year, levels)) in points.iter().enumerate() {
            if !year.is_finite() || *year < 0.0 {
                return Err(Error::out_of_range(
                    "salience_schedule",
                    format!("point {i}: year must be finite and >= 0"),
                ));
            }
            if i > 0 && *year <= points[i - 1].0 {
                return Err(Error::out_of_range(
                    "salience_schedule",
                    format!("point {i}: years must be strictly increasing"),
                ));
            }
            if levels.iter().any(|s| !s.is_finite() || *s < 0.0) {
                return Err(Error::out_of_range(
                    "salience_schedule",
                    format!("point {i}: levels must be finite and >= 0"),
                ));
            }
        }
        Ok(Self { points })
    }

    /// The same level in every domain, forever.
    pub fn constant(level: f64) -> Result<Self> {
        Self::new(vec![(0.0, [level; DOMAINS])])
    }

    /// Yearly steps `start + slope * year` for `year = 0..=until`, held after.
    pub fn linear_ramp(start: f64, slope: f64, until: u32) -> Result<Self> {
        let points = (0..=until)
            .map(|y| {
                let year = f64::from(y);
                (year, [start + slope * year; DOMAINS])
            })
            .collect();
        Self::new(points)
    }

    pub fn points(&self) -> &[(f64, [f64; DOMAINS])] {
        &self.points
    }

    /// Levels in force at time `t` (years since start).
    pub fn at(&self, t: f64) -> Result<[f64; DOMAINS]> {
        if !t.is_finite() || t + YEAR_EPS < self.points[0].0 {
            return Err(Error::Config(format!(
                "salience schedule undefined at t = {t}"
            )));
        }
        let idx = self
            .points
            .partition_point(|(year, _)| *year <= t + YEAR_EPS);
        Ok(self.points[idx.max(1) - 1].1)
    }

    /// Multiplies every level by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.points
                .iter()
                .map(|(y, l)| (*y, l.map(|s| s * factor)))
                .collect(),
        )
    }

    /// Constant schedule frozen at the t = 0 levels.
    pub fn frozen_at_start(&self) -> Self {
        Self {
            points: vec![(0.0, self.points[0].1)],
        }
    }

    pub(crate) fn starts_at_zero(&self) -> bool {
        self.points[0].0 == 0.0
    }
}

impl TryFrom<Vec<(f64, [f64; DOMAINS])>> for SalienceSchedule {
    type Error = Error;

    fn try_from(points: Vec<(f64, [f64; DOMAINS])>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<SalienceSchedule> for Vec<(f64, [f64; DOMAINS])> {
    fn from(s: SalienceSchedule) -> Self {
        s.points
    }
}
