//! Least-squares fits of model parameters to observed capacity series.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::calibration::series::CapacitySeries;
use crate::error::{Error, Result};
use crate::interventions::InterventionSet;
use crate::model::{simulate, ModelParams, SystemState, DOMAINS};
use crate::scenarios::Calibration;

/// Annual multiplicative rate `r` of `v(t) = v0 (1 + r)^(t - t0)`, fitted by
/// ordinary least squares on `ln v`.
pub fn fit_decay_rate(series: &CapacitySeries) -> Result<f64> {
    series.validate()?;
    if series.len() < 2 {
        return Err(Error::Config(format!(
            "{}: decay fit needs at least 2 observations, got {}",
            series.label,
            series.len()
        )));
    }
    let t0 = series.observations[0].year;
    let xs: Vec<f64> = series.observations.iter().map(|o| o.year - t0).collect();
    let ys: Vec<f64> = series.observations.iter().map(|o| o.value.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok((sxy / sxx).exp_m1())
}

/// Total relative change implied by `rate` over `years`.
pub fn implied_change(rate: f64, years: f64) -> f64 {
    (1.0 + rate).powf(years) - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitParam {
    Delta,
    Alpha,
    Gamma,
    /// Multiplier on the whole salience schedule.
    SLevel,
}

impl FitParam {
    pub const ALL: [FitParam; 4] = [FitParam::Delta, FitParam::Alpha, FitParam::Gamma, FitParam::SLevel];

    pub fn name(self) -> &'static str {
        match self {
            FitParam::Delta => "delta",
            FitParam::Alpha => "alpha",
            FitParam::Gamma => "gamma",
            FitParam::SLevel => "s_level",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| Error::Config(format!("unknown fit parameter `{name}` (expected delta, alpha, gamma or s_level)")))
    }
}

/// A free parameter and its closed search interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeParam {
    pub param: FitParam,
    pub lo: f64,
    pub hi: f64,
}

impl FreeParam {
    pub fn new(param: FitParam, lo: f64, hi: f64) -> Self {
        Self { param, lo, hi }
    }
}

/// Model a series is fitted against: simulation starts at the first
/// observation year and capacity is read from `domain`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitModel {
    pub params: ModelParams,
    pub interventions: InterventionSet,
    pub c0: [f64; DOMAINS],
    pub domain: usize,
}

impl FitModel {
    /// Baseline dynamics of the frozen calibration, economic domain.
    pub fn baseline() -> Self {
        let cal = Calibration::frozen();
        Self {
            params: cal.baseline_params(),
            interventions: InterventionSet::none(),
            c0: [cal.c0; DOMAINS],
            domain: 0,
        }
    }

    /// Parameters with the given free values substituted.
    pub fn with_values(&self, values: &[(FitParam, f64)]) -> Result<ModelParams> {
        let mut p = self.params.clone();
        for &(param, v) in values {
            match param {
                FitParam::Delta => p.delta = v,
                FitParam::Alpha => p.alpha = v,
                FitParam::Gamma => p.gamma = v,
                FitParam::SLevel => p.salience_schedule = self.params.salience_schedule.scaled(v)?,
            }
        }
        p.validate()?;
        Ok(p)
    }

    /// Simulated capacity at each of `years` (relative to the first),
    /// linearly interpolated between samples.
    pub fn capacity_at(&self, values: &[(FitParam, f64)], years: &[f64]) -> Result<Vec<f64>> {
        let p = self.with_values(values)?;
        let (first, last) = match (years.first(), years.last()) {
            (Some(a), Some(b)) => (*a, *b),
            _ => return Ok(Vec::new()),
        };
        let horizon = ((last - first) / p.dt - 1e-9).ceil().max(0.0) * p.dt;
        let init = SystemState::from_capacities(self.c0, &p)?;
        let traj = simulate(&init, &p, &self.interventions, horizon)?;
        let cap = traj.capacity_series(self.domain);
        Ok(years
            .iter()
            .map(|y| {
                let tau = y - first;
                let k = ((tau / p.dt).floor() as usize).min(cap.len() - 1);
                if k + 1 >= cap.len() {
                    return cap[k].1;
                }
                let (t0, c0) = cap[k];
                let (t1, c1) = cap[k + 1];
                c0 + (c1 - c0) * (tau - t0) / (t1 - t0)
            })
            .collect())
    }

    /// Synthetic series of this model's capacity at `years`, scaled so the
    /// first value is `scale`.
    pub fn synthetic_series(&self, values: &[(FitParam, f64)], years: &[f64], scale: f64) -> Result<CapacitySeries> {
        let caps = self.capacity_at(values, years)?;
        let pairs: Vec<(f64, f64)> = years.iter().zip(&caps).map(|(y, c)| (*y, c * scale / caps[0])).collect();
        CapacitySeries::from_pairs("synthetic", &pairs)
    }

    /// Squared error between the rescaled simulation and `series`.
    fn rss(&self, series: &CapacitySeries, values: &[(FitParam, f64)]) -> f64 {
        let years = series.years();
        let obs = series.values();
        match self.capacity_at(values, &years) {
            Ok(sim) if sim[0] > 0.0 => {
                let scale = obs[0] / sim[0];
                sim.iter().zip(&obs).map(|(s, o)| (s * scale - o).powi(2)).sum()
            }
            _ => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: BTreeMap<String, f64>,
    pub rss: f64,
    pub iterations: usize,
    /// The refinement step shrank below tolerance (or the objective hit
    /// zero) before the iteration budget ran out.
    pub converged: bool,
}

impl FitResult {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }
}

fn grid_values(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// Grid points refined by pattern search in [`fit_params`].
pub const REFINE_STARTS: usize = 8;

/// Pattern search from `x` with halving steps, clamped to the
/// bounds. Returns the point, its objective, iterations and whether the
/// step shrank below tolerance.
fn refine(
    objective: &dyn Fn(&[f64]) -> f64,
    free: &[FreeParam],
    mut x: Vec<f64>,
    mut best: f64,
    grid_n: usize,
    refine_iters: usize,
) -> (Vec<f64>, f64, usize, bool) {
    let mut step: Vec<f64> = free
        .iter()
        .map(|f| (f.hi - f.lo) / (grid_n.max(2) - 1) as f64 / 2.0)
        .collect();
    let tol: Vec<f64> = free.iter().map(|f| 1e-12 * (f.hi - f.lo).max(1.0)).collect();
    let done = |best: f64, step: &[f64]| best == 0.0 || step.iter().zip(&tol).all(|(s, t)| s <= t);
    // unit moves along each axis, then along each pair of axes: the
    // diagonals let the search follow ridges that axis moves cannot
    let n = x.len();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for k in 0..n {
        for sign in [1.0, -1.0] {
            let mut d = vec![0.0; n];
            d[k] = sign;
            dirs.push(d);
        }
    }
    for k in 0..n {
        for l in k + 1..n {
            for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut d = vec![0.0; n];
                d[k] = a;
                d[l] = b;
                dirs.push(d);
            }
        }
    }
    let mut iterations = 0;
    while !done(best, &step) && iterations < refine_iters {
        iterations += 1;
        let mut improved = false;
        for d in &dirs {
            let cand: Vec<f64> = (0..n)
                .map(|k| (x[k] + d[k] * step[k]).clamp(free[k].lo, free[k].hi))
                .collect();
            if cand == x {
                continue;
            }
            let r = objective(&cand);
            if r < best {
                best = r;
                x = cand;
                improved = true;
            }
        }
        if !improved {
            for s in &mut step {
                *s *= 0.5;
            }
        }
    }
    let converged = done(best, &step);
    (x, best, iterations, converged)
}

/// Coarse grid search over the free parameters followed by coordinate
/// pattern-search refinement, clamped to the bounds.
pub fn fit_params(
    series: &CapacitySeries,
    model: &FitModel,
    free: &[FreeParam],
    grid_n: usize,
    refine_iters: usize,
) -> Result<FitResult> {
    series.validate()?;
    if free.is_empty() {
        return Err(Error::Config("no free parameters".into()));
    }
    if series.len() < 2 || (free.len() > 1 && series.len() < 3) {
        return Err(Error::Config(format!(
            "{} observations are too few to fit {} parameters",
            series.len(),
            free.len()
        )));
    }
    if grid_n == 0 {
        return Err(Error::Config("grid_n must be at least 1".into()));
    }
    for (i, f) in free.iter().enumerate() {
        if !(f.lo.is_finite() && f.hi.is_finite() && f.lo <= f.hi) {
            return Err(Error::out_of_range(f.param.name(), format!("invalid bounds [{}, {}]", f.lo, f.hi)));
        }
        if free[..i].iter().any(|g| g.param == f.param) {
            return Err(Error::Duplicate(f.param.name().to_string()));
        }
    }

    let objective = |x: &[f64]| -> f64 {
        let values: Vec<(FitParam, f64)> = free.iter().zip(x).map(|(f, v)| (f.param, *v)).collect();
        model.rss(series, &values)
    };

    let axes: Vec<Vec<f64>> = free.iter().map(|f| grid_values(f.lo, f.hi, grid_n)).collect();
    let total: usize = axes.iter().map(Vec::len).product();
    let point = |mut idx: usize| -> Vec<f64> {
        let mut x = vec![0.0; axes.len()];
        for k in (0..axes.len()).rev() {
            x[k] = axes[k][idx % axes[k].len()];
            idx /= axes[k].len();
        }
        x
    };
    let eval = |i: usize| objective(&point(i));
    #[cfg(feature = "parallel")]
    let scores: Vec<f64> = {
        use rayon::prelude::*;
        (0..total).into_par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let scores: Vec<f64> = (0..total).map(eval).collect();

    let mut order: Vec<usize> = (0..total).filter(|&i| scores[i].is_finite()).collect();
    if order.is_empty() {
        return Err(Error::Config("no feasible parameter vector on the grid".into()));
    }
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));

    // The objective has kinks where the usage switch flips, so a single
    // coordinate search can stall on a ridge; refine the best few grid
    // points and keep the best outcome.
    let mut iterations = 0;
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for &start in order.iter().take(REFINE_STARTS) {
        let (x, rss, its, converged) = refine(&objective, free, point(start), scores[start], grid_n, refine_iters);
        iterations += its;
        if best.as_ref().is_none_or(|b| rss < b.1) {
            best = Some((x, rss, converged));
        }
    }
    let (x, best, converged) = best.expect("at least one start");

    Ok(FitResult {
        params: free
            .iter()
            .zip(&x)
            .map(|(f, v)| (f.param.name().to_string(), *v))
            .collect(),
        rss: best,
        iterations,
        converged,
    })
}
