//! Seeded Monte Carlo spread of crossing years.
//!
//! Draws are uniform and independent per interval, generated in order from a
//! ChaCha8 stream seeded with `seed`, so a given `(scenario, intervals, n,
//! seed)` reproduces the same statistics on every platform. Simulations run
//! in parallel but results are written back by draw index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{crossing_year_of, scenario_c_bar};
use crate::error::{Error, Result};
use crate::report::config::ScenarioConfig;

/// Closed sampling intervals for the uncertain rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamIntervals {
    pub delta: (f64, f64),
    pub alpha: (f64, f64),
}

impl ParamIntervals {
    /// Shipped intervals: the literature band around the baseline rates.
    pub fn shipped() -> Self {
        Self {
            delta: (0.06, 0.10),
            alpha: (0.07, 0.11),
        }
    }

    pub fn fixed(delta: f64, alpha: f64) -> Self {
        Self {
            delta: (delta, delta),
            alpha: (alpha, alpha),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (key, (lo, hi)) in [("delta", self.delta), ("alpha", self.alpha)] {
            if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi && hi < 1.0) {
                return Err(Error::out_of_range(
                    key,
                    format!("interval [{lo}, {hi}] must satisfy 0 <= lo <= hi < 1"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandResult {
    pub scenario: String,
    pub n: usize,
    pub seed: u64,
    /// Statistics over all `n` draws; a draw that never crosses counts as
    /// the horizon (right-censored).
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    /// Draws that never crossed within the horizon.
    pub censored: usize,
    /// Draws rejected as invalid parameter sets and redrawn.
    pub rejected: usize,
    pub horizon_years: f64,
}

impl BandResult {
    pub fn crossing_fraction(&self) -> f64 {
        (self.n - self.censored) as f64 / self.n as f64
    }
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Draws `n` `(delta, alpha)` pairs, redrawing any with `delta + alpha >= 1`.
pub fn draw_params(intervals: &ParamIntervals, n: usize, seed: u64) -> Result<(Vec<(f64, f64)>, usize)> {
    intervals.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut rejected = 0usize;
    while out.len() < n {
        let d = draw(&mut rng, intervals.delta);
        let a = draw(&mut rng, intervals.alpha);
        if d + a < 1.0 {
            out.push((d, a));
        } else {
            rejected += 1;
            if rejected > 1000 * n.max(1) {
                return Err(Error::Config(
                    "parameter intervals almost never yield delta + alpha < 1".into(),
                ));
            }
        }
    }
    Ok((out, rejected))
}

/// Economic-domain crossing-year statistics over `n` random draws.
pub fn monte_carlo_band(
    scenario: &ScenarioConfig,
    intervals: &ParamIntervals,
    n: usize,
    seed: u64,
) -> Result<BandResult> {
    if n < 2 {
        return Err(Error::Config(format!("band needs n >= 2, got {n}")));
    }
    scenario.validate()?;
    let c_bar = scenario_c_bar(scenario)?;
    let (draws, rejected) = draw_params(intervals, n, seed)?;

    let eval = |&(d, a): &(f64, f64)| -> Result<Option<f64>> {
        let mut cfg = scenario.clone();
        cfg.params.delta = d;
        cfg.params.alpha = a;
        crossing_year_of(&cfg, c_bar, 0)
    };
    #[cfg(feature = "parallel")]
    let years: Result<Vec<Option<f64>>> = {
        use rayon::prelude::*;
        draws.par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let years: Result<Vec<Option<f64>>> = draws.iter().map(eval).collect();
    let years = years?;

    let horizon = scenario.horizon_years;
    let censored = years.iter().filter(|y| y.is_none()).count();
    let values: Vec<f64> = years.iter().map(|y| y.unwrap_or(horizon)).collect();
    let (mean, sd, min, max) = summary_stats(&values);
    Ok(BandResult {
        scenario: scenario.id.clone(),
        n,
        seed,
        mean,
        sd,
        min,
        max,
        censored,
        rejected,
        horizon_years: horizon,
    })
}

/// Mean, sample standard deviation, min and max. A constant sample reports
/// exactly its value and zero spread.
pub fn summary_stats(values: &[f64]) -> (f64, f64, f64, f64) {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return (min, 0.0, min, max);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt(), min, max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_seeded() {
        let iv = ParamIntervals::shipped();
        let (a, _) = draw_params(&iv, 50, 7).unwrap();
        let (b, _) = draw_params(&iv, 50, 7).unwrap();
        let (c, _) = draw_params(&iv, 50, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a
            .iter()
            .all(|&(d, al)| (0.06..=0.10).contains(&d) && (0.07..=0.11).contains(&al)));
    }

    #[test]
    fn invalid_draws_are_rejected() {
        let iv = ParamIntervals {
            delta: (0.3, 0.7),
            alpha: (0.3, 0.6),
        };
        let (draws, rejected) = draw_params(&iv, 200, 1).unwrap();
        assert!(rejected > 0);
        assert!(draws.iter().all(|(d, a)| d + a < 1.0));
    }

    #[test]
    fn stats() {
        let (m, sd, lo, hi) = summary_stats(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!((m, lo, hi), (2.5, 1.0, 4.0));
        assert!((sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(summary_stats(&[0.1; 7]), (0.1, 0.0, 0.1, 0.1));
    }

    #[test]
    fn interval_validation() {
        assert!(ParamIntervals {
            delta: (0.2, 0.1),
            alpha: (0.1, 0.1)
        }
        .validate()
        .is_err());
        assert!(ParamIntervals::fixed(0.08, 1.0).validate().is_err());
    }
}
