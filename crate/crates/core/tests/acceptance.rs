//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use disempower_core::analysis::{
    bisect_basin_boundary, monte_carlo_band, run_scenario, sweep, Fate, GridAxis,
    ParamIntervals, ThresholdOutcome,
};
use disempower_core::calibration::{
    budget_fixture, fit_decay_rate, fit_params, implied_change, FitModel, FitParam, FreeParam,
};
use disempower_core::interventions::InterventionSet;
use disempower_core::model::{
    capacity_step, delegation_fraction, simulate, uniform_coupling, ModelParams,
    SalienceSchedule, SystemState,
};
use disempower_core::report::{
    capacity_chart, render_svg_chart, write_summary_json, write_trajectory_csv, Report,
};
use disempower_core::report::summary::RunReport;
use disempower_core::scenarios::{builtin, frozen_calibration, DivergenceArm, DIVERGENCE_YEAR};

type Outcome = Result<String, String>;

struct Suite {
    passed: usize,
    failed: usize,
}

impl Suite {
    fn check(&mut self, id: &str, name: &str, f: impl FnOnce() -> Outcome) {
        let outcome = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| Err(format!("panicked: {}", panic_text(&p))));
        match outcome {
            Ok(detail) => {
                self.passed += 1;
                println!("PASS {id:<4} {name}: {detail}");
            }
            Err(detail) => {
                self.failed += 1;
                println!("FAIL {id:<4} {name}: {detail}");
            }
        }
    }
}

fn panic_text(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_default()
}

fn in_band(what: &str, v: f64, lo: f64, hi: f64) -> Outcome {
    let msg = format!("{what} = {v:.4}, band [{lo}, {hi}]");
    if (lo..=hi).contains(&v) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn err(e: disempower_core::Error) -> String {
    e.to_string()
}

fn crossing(id: &str) -> Result<Option<f64>, String> {
    let cfg = builtin(id).map_err(err)?;
    Ok(run_scenario(&cfg).map_err(err)?.crossing_year[0])
}

fn band_mean(id: &str, lo: f64, hi: f64) -> Outcome {
    let cfg = builtin(id).map_err(err)?;
    let b = monte_carlo_band(&cfg, &ParamIntervals::shipped(), 200, 7).map_err(err)?;
    in_band(&format!("{id} mean crossing (sd {:.2}, censored {})", b.sd, b.censored), b.mean, lo, hi)
}

fn eq1_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut p = ModelParams {
        rho_r: 0.0,
        a_dec: 0.0,
        dt: 1.0,
        ..ModelParams::default()
    };
    let n = 100_000;
    for k in 0..n {
        let c: f64 = rng.random();
        let d: f64 = rng.random();
        let u = rng.random_bool(0.5) as u8;
        p.delta = rng.random();
        p.alpha = rng.random();
        let got = capacity_step(c, d, u, 0.0, &p, 1.0).map_err(err)?;
        let want = (c * (1.0 - p.delta * d - p.alpha * f64::from(u))).max(0.0);
        if got.to_bits() != want.to_bits() {
            return Err(format!("tuple {k}: got {got:e}, want {want:e}"));
        }
    }
    Ok(format!("{n} tuples bit-identical"))
}

fn scenario_crossing(id: &str, lo: f64, hi: f64) -> Outcome {
    match crossing(id)? {
        Some(y) => in_band(&format!("{id} crossing year"), y, lo, hi),
        None => Err(format!("{id} never crosses")),
    }
}

fn full_architecture_holds() -> Outcome {
    let cfg = builtin("full-architecture").map_err(err)?;
    let b = monte_carlo_band(&cfg, &ParamIntervals::shipped(), 200, 7).map_err(err)?;
    let share = b.censored as f64 / b.n as f64;
    let msg = format!("{} of {} draws never cross within {} years", b.censored, b.n, b.horizon_years);
    if share >= 0.95 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn std_mitigation_still_crosses() -> Outcome {
    let cfg = builtin("std-mitigation").map_err(err)?;
    let b = monte_carlo_band(&cfg, &ParamIntervals::shipped(), 200, 7).map_err(err)?;
    let msg = format!("{} of {} draws cross within {} years", b.n - b.censored, b.n, b.horizon_years);
    if b.crossing_fraction() >= 0.95 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn divergence(arm: DivergenceArm) -> Result<f64, String> {
    let cfg = frozen_calibration().divergence_arm(arm);
    disempower_core::analysis::divergence_at(&cfg, DIVERGENCE_YEAR, 0).map_err(err)
}

fn budget_fit() -> Outcome {
    let r = fit_decay_rate(&budget_fixture()).map_err(err)?;
    let decline = -implied_change(r, 17.0);
    let msg = format!("rate {r:.5}/yr, 2007-2024 decline {:.2}%", 100.0 * decline);
    if (r + 0.0284).abs() <= 0.0005 && (decline - 0.39).abs() <= 0.01 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// `c' = c + c(1 - c)(c - 0.3) dt`: stable points 0 and 1, unstable 0.3.
fn cubic_fate(c0: f64) -> disempower_core::Result<Fate> {
    let mut c = c0;
    for _ in 0..4000 {
        c += c * (1.0 - c) * (c - 0.3) * 0.25;
    }
    Ok(if c < 1e-3 { Fate::Decayed } else { Fate::Persisted })
}

fn cubic_bisection() -> Outcome {
    let mut parts = Vec::new();
    for tol in [1e-2, 1e-3, 1e-4] {
        let out = bisect_basin_boundary(cubic_fate, 0.0, 1.0, tol).map_err(err)?;
        let c = match out {
            ThresholdOutcome::Bistable(r) => r.c_bar,
            ThresholdOutcome::Monostable(f) => return Err(format!("monostable ({f:?})")),
        };
        parts.push(format!("tol {tol:e}: {c:.6}"));
        if (c - 0.3).abs() > tol {
            return Err(parts.join(", "));
        }
    }
    Ok(parts.join(", "))
}

fn decoupling() -> Outcome {
    let p = ModelParams {
        coupling: uniform_coupling(0.0),
        ..ModelParams::default()
    };
    let none = InterventionSet::none();
    let c0 = [0.9, 0.5, 0.15];
    let joint = simulate(&SystemState::from_capacities(c0, &p).map_err(err)?, &p, &none, 60.0).map_err(err)?;
    let mut worst = 0.0f64;
    for (i, &c) in c0.iter().enumerate() {
        let alone = simulate(&SystemState::uniform(c, &p).map_err(err)?, &p, &none, 60.0).map_err(err)?;
        for (a, b) in joint.samples.iter().zip(&alone.samples) {
            let (x, y) = (a.state.domains[i], b.state.domains[0]);
            for gap in [x.c - y.c, x.s - y.s, x.d - y.d, x.v_e - y.v_e, a.divergence[i] - b.divergence[0]] {
                worst = worst.max(gap.abs());
            }
            if x.u != y.u {
                worst = f64::INFINITY;
            }
        }
    }
    if worst <= 1e-12 {
        Ok(format!("max deviation {worst:e}"))
    } else {
        Err(format!("max deviation {worst:e}"))
    }
}

fn absorption() -> Outcome {
    let p = ModelParams::default();
    let traj = simulate(&SystemState::uniform(0.0, &p).map_err(err)?, &p, &InterventionSet::none(), 60.0)
        .map_err(err)?;
    let bad = traj
        .samples
        .iter()
        .flat_map(|s| s.state.domains.iter())
        .filter(|d| d.c != 0.0)
        .count();
    if bad == 0 {
        Ok(format!("c stays 0 over {} samples", traj.len()))
    } else {
        Err(format!("{bad} nonzero capacities"))
    }
}

fn delegation_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 10_000;
    for _ in 0..n {
        let s: f64 = rng.random_range(0.0..5.0);
        let c: f64 = rng.random_range(0.0..1.0);
        let g: f64 = rng.random_range(0.1..10.0);
        let h: f64 = rng.random_range(1e-6..1.0);
        let d = delegation_fraction(s, c, g).map_err(err)?;
        let d_s = delegation_fraction(s + h, c, g).map_err(err)?;
        let d_c = delegation_fraction(s, c + h, g).map_err(err)?;
        if d_s < d || d_c > d {
            return Err(format!("violated at s={s}, c={c}, gamma={g}, h={h}"));
        }
    }
    Ok(format!("{n} samples: nondecreasing in s, nonincreasing in c"))
}

fn sweep_monotonicity() -> Outcome {
    let cfg = builtin("baseline").map_err(err)?;
    let r = sweep(
        &cfg,
        GridAxis::parse("0.03:0.15:7").map_err(err)?,
        GridAxis::parse("0.02:0.15:7").map_err(err)?,
    )
    .map_err(err)?;
    let bad = r.monotonicity_violations();
    if bad.is_empty() {
        Ok(format!("{} cells monotone in delta and alpha", r.cells.len()))
    } else {
        Err(format!("violations at {bad:?}"))
    }
}

fn convergence_factor() -> Outcome {
    // smooth regime: the usage switch never fires and salience is constant
    let yearly = |dt: f64| -> Result<Vec<[f64; 3]>, String> {
        let p = ModelParams {
            theta_use: 1.0,
            salience_schedule: SalienceSchedule::constant(1.0).map_err(err)?,
            dt,
            ..ModelParams::default()
        };
        let traj = simulate(&SystemState::uniform(1.0, &p).map_err(err)?, &p, &InterventionSet::none(), 20.0)
            .map_err(err)?;
        let per_year = (1.0 / dt).round() as usize;
        Ok(traj
            .samples
            .iter()
            .step_by(per_year)
            .map(|s| s.state.domains.map(|d| d.c))
            .collect())
    };
    let max_gap = |a: &[[f64; 3]], b: &[[f64; 3]]| {
        a.iter()
            .zip(b)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
            .fold(0.0f64, f64::max)
    };
    let (a, b, c) = (yearly(0.5)?, yearly(0.25)?, yearly(0.125)?);
    let factor = max_gap(&a, &b) / max_gap(&b, &c);
    let msg = format!("max-norm gap shrinks by {factor:.3} when dt halves");
    if factor >= 1.8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn byte_determinism() -> Outcome {
    let render = || -> Result<(String, String, String), String> {
        let cfg = builtin("baseline").map_err(err)?;
        let traj = run_scenario(&cfg).map_err(err)?;
        let csv = write_trajectory_csv(&traj);
        let band = monte_carlo_band(&cfg, &ParamIntervals::shipped(), 50, 7).map_err(err)?;
        let json = write_summary_json(&[
            Report::Run(RunReport::from_trajectory(&cfg.id, 0.2, cfg.horizon_years, &traj)),
            Report::Band(band),
        ]);
        let svg = render_svg_chart(&capacity_chart("baseline", &[("baseline", &traj)], 0, 0.2)).map_err(err)?;
        Ok((csv, json, svg))
    };
    let first = render()?;
    let second = render()?;
    if first == second {
        Ok(format!(
            "CSV {} B, JSON {} B, SVG {} B identical",
            first.0.len(),
            first.1.len(),
            first.2.len()
        ))
    } else {
        Err("outputs differ between runs".into())
    }
}

fn calibration_round_trip() -> Outcome {
    let model = FitModel::baseline();
    let years: Vec<f64> = (0..=60).map(f64::from).collect();
    let free = [
        FreeParam::new(FitParam::Delta, 0.03, 0.15),
        FreeParam::new(FitParam::Alpha, 0.02, 0.15),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for case in 0..20 {
        let d = rng.random_range(0.03..=0.15);
        let a = rng.random_range(0.02..=0.15);
        let series = model
            .synthetic_series(&[(FitParam::Delta, d), (FitParam::Alpha, a)], &years, 100.0)
            .map_err(err)?;
        let fit = fit_params(&series, &model, &free, 9, 300).map_err(err)?;
        let (fd, fa) = (fit.get("delta").unwrap(), fit.get("alpha").unwrap());
        let e = (fd - d).abs().max((fa - a).abs());
        worst = worst.max(e);
        if e > 0.015 {
            return Err(format!(
                "case {case}: true ({d:.4}, {a:.4}), fitted ({fd:.4}, {fa:.4}), rss {:e}",
                fit.rss
            ));
        }
    }
    Ok(format!("20 cases, worst error {worst:.2e}"))
}

fn main() -> ExitCode {
    let mut s = Suite { passed: 0, failed: 0 };
    s.check("1", "capacity update exactness", eq1_exactness);
    s.check("2", "baseline crossing", || scenario_crossing("baseline", 15.0, 20.0));
    s.check("3", "conservative crossing", || scenario_crossing("conservative", 40.0, 50.0));
    s.check("4", "aggressive crossing", || scenario_crossing("aggressive", 8.0, 12.0));
    s.check("5a", "baseline Monte Carlo mean", || band_mean("baseline", 15.0, 21.0));
    s.check("5b", "std-mitigation Monte Carlo mean", || band_mean("std-mitigation", 21.0, 29.0));
    s.check("5c", "decoupled Monte Carlo mean", || band_mean("decoupled", 33.0, 43.0));
    s.check("5d", "full architecture holds", full_architecture_holds);
    s.check("5e", "std-mitigation delays but still crosses", std_mitigation_still_crosses);
    s.check("6a", "locked-in divergence", || {
        in_band("divergence at year 24", divergence(DivergenceArm::LockedIn)?, 0.66, 0.70)
    });
    s.check("6b", "nested-forums divergence", || {
        in_band("divergence at year 24", divergence(DivergenceArm::NestedForums)?, 0.20, 0.30)
    });
    s.check("6c", "continuous-deliberation divergence", || {
        in_band("divergence at year 24", divergence(DivergenceArm::ContinuousDeliberation)?, 0.0, 0.10)
    });
    s.check("7", "budget case-study fit", budget_fit);
    s.check("8", "cubic-map threshold bisection", cubic_bisection);
    s.check("9a", "decoupling", decoupling);
    s.check("9b", "absorption at zero capacity", absorption);
    s.check("9c", "delegation monotonicity", delegation_monotonicity);
    s.check("9d", "sweep monotonicity", sweep_monotonicity);
    s.check("9e", "step-size convergence", convergence_factor);
    s.check("9f", "byte determinism", byte_determinism);
    s.check("10", "calibration round trip", calibration_round_trip);
    println!("{} passed, {} failed", s.passed, s.failed);
    if s.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
