use serde::{Deserialize, Serialize};

use crate::analysis::{crossing_year_of, scenario_c_bar};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::report::config::ScenarioConfig;

/// Evenly spaced grid `lo..=hi` with `n` points; `n = 1` is the single
/// point `lo`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridAxis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("grid axis needs at least one point".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi < 1.0 && lo <= hi) {
            return Err(Error::Config(format!(
                "grid range must satisfy 0 < lo <= hi < 1, got {lo}:{hi}"
            )));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn single(value: f64) -> Result<Self> {
        Self::new(value, value, 1)
    }

    /// Parses `lo:hi:n`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || Error::Config(format!("expected lo:hi:n, got `{text}`"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        Self::new(lo, hi, n)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| if i + 1 == self.n { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub delta: f64,
    pub alpha: f64,
    /// Economic-domain crossing year; `None` when it stays above the
    /// threshold for the whole horizon.
    pub crossing_year: Option<f64>,
}

/// Crossing years over a rectangular delta x alpha grid, stored row-major by
/// (delta index, alpha index).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub scenario: String,
    pub delta_values: Vec<f64>,
    pub alpha_values: Vec<f64>,
    pub cells: Vec<SweepCell>,
    pub c_bar: f64,
    pub horizon_years: f64,
    pub params: ModelParams,
}

impl SweepResult {
    pub fn cell(&self, delta_idx: usize, alpha_idx: usize) -> &SweepCell {
        &self.cells[delta_idx * self.alpha_values.len() + alpha_idx]
    }

    /// Cells where raising delta (alpha fixed) or raising alpha (delta
    /// fixed) delays the crossing. Empty when the grid is monotone.
    pub fn monotonicity_violations(&self) -> Vec<(usize, usize)> {
        let key = |c: &SweepCell| c.crossing_year.unwrap_or(f64::INFINITY);
        let (nd, na) = (self.delta_values.len(), self.alpha_values.len());
        let mut bad = Vec::new();
        for i in 0..nd {
            for j in 0..na {
                let here = key(self.cell(i, j));
                let later_d = i + 1 < nd && key(self.cell(i + 1, j)) > here;
                let later_a = j + 1 < na && key(self.cell(i, j + 1)) > here;
                if later_d || later_a {
                    bad.push((i, j));
                }
            }
        }
        bad
    }
}

/// One simulation per grid cell of `scenario` with delta and alpha replaced.
pub fn sweep(scenario: &ScenarioConfig, delta: GridAxis, alpha: GridAxis) -> Result<SweepResult> {
    scenario.validate()?;
    let c_bar = scenario_c_bar(scenario)?;
    let deltas = delta.values();
    let alphas = alpha.values();
    let grid: Vec<(f64, f64)> = deltas
        .iter()
        .flat_map(|&d| alphas.iter().map(move |&a| (d, a)))
        .collect();

    let eval = |&(d, a): &(f64, f64)| -> Result<SweepCell> {
        let mut cfg = scenario.clone();
        cfg.params.delta = d;
        cfg.params.alpha = a;
        Ok(SweepCell {
            delta: d,
            alpha: a,
            crossing_year: crossing_year_of(&cfg, c_bar, 0)?,
        })
    };

    #[cfg(feature = "parallel")]
    let cells: Result<Vec<SweepCell>> = {
        use rayon::prelude::*;
        grid.par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let cells: Result<Vec<SweepCell>> = grid.iter().map(eval).collect();

    Ok(SweepResult {
        scenario: scenario.id.clone(),
        delta_values: deltas,
        alpha_values: alphas,
        cells: cells?,
        c_bar,
        horizon_years: scenario.horizon_years,
        params: scenario.params.clone(),
    })
}
