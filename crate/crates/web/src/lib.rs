//! Browser demo: renders capacity, sweep and divergence charts as SVG
//! strings for a static page.
//!
//! The rendering functions are plain Rust so they run and test natively; the
//! `wasm32` build adds thin `wasm_bindgen` exports over them.

use disempower_core::analysis::{run_scenario, sweep, GridAxis};
use disempower_core::interventions::{Firewalls, InterventionSet};
use disempower_core::model::Trajectory;
use disempower_core::report::{
    capacity_chart, divergence_chart, render_svg_chart, render_svg_heatmap, sig9, sweep_heatmap,
};
use disempower_core::scenarios::{frozen_calibration, DivergenceArm};
use disempower_core::{Result, ScenarioConfig};

/// Intervention toggles, one bit per mechanism.
pub const STD_MITIGATION: u32 = 1;
pub const DECOUPLED_STREAMS: u32 = 1 << 1;
pub const IRREDUCIBLE_DELIBERATION: u32 = 1 << 2;
pub const NESTED_FORUMS: u32 = 1 << 3;
pub const FIREWALLS: u32 = 1 << 4;

/// Interventions switched on in `mask`, at their calibrated strengths.
pub fn interventions_from_mask(mask: u32) -> InterventionSet {
    let cal = frozen_calibration();
    let on = |bit: u32| mask & bit != 0;
    InterventionSet {
        std_mitigation: on(STD_MITIGATION).then(|| cal.std_mitigation()),
        decoupled_streams: on(DECOUPLED_STREAMS).then(|| cal.decoupled_streams()),
        irreducible_deliberation: on(IRREDUCIBLE_DELIBERATION).then(|| cal.irreducible_deliberation()),
        nested_forums: on(NESTED_FORUMS).then(|| cal.nested_forums()),
        firewalls: on(FIREWALLS).then_some(Firewalls { active_from: 0.0 }),
    }
}

fn scenario(delta: f64, alpha: f64, mask: u32) -> Result<ScenarioConfig> {
    let mut cfg = frozen_calibration().scenario("baseline")?;
    cfg.id = "custom".into();
    cfg.params.delta = delta;
    cfg.params.alpha = alpha;
    cfg.interventions = interventions_from_mask(mask);
    cfg.validate()?;
    Ok(cfg)
}

fn legend_label(name: &str, traj: &Trajectory, horizon: f64) -> String {
    match traj.crossing_year[0] {
        Some(y) => format!("{name} (crosses at {} y)", sig9((y * 10.0).round() / 10.0)),
        None => format!("{name} (holds {horizon} y)"),
    }
}

/// Economic-domain capacity for the given rates and intervention mask,
/// overlaid on the same rates with no interventions.
pub fn capacity_svg(delta: f64, alpha: f64, mask: u32) -> Result<String> {
    let with = scenario(delta, alpha, mask)?;
    let without = scenario(delta, alpha, 0)?;
    let (a, b) = (run_scenario(&without)?, run_scenario(&with)?);
    let la = legend_label("no interventions", &a, without.horizon_years);
    let lb = legend_label("selected", &b, with.horizon_years);
    let c_bar = with.c_bar_ref.unwrap_or_default();
    let spec = capacity_chart("Economic-domain capacity", &[(&la, &a), (&lb, &b)], 0, c_bar);
    render_svg_chart(&spec)
}

/// Crossing-year heatmap on an `n` x `n` grid over the literature ranges of
/// delta and alpha, with the interventions in `mask` applied.
pub fn sweep_svg(n: usize, mask: u32) -> Result<String> {
    let cfg = scenario(0.08, 0.09, mask)?;
    let result = sweep(&cfg, GridAxis::new(0.03, 0.15, n)?, GridAxis::new(0.02, 0.15, n)?)?;
    render_svg_heatmap(&sweep_heatmap(&result))
}

/// Welfare divergence of the locked-in, nested-forum and continuous
/// deliberation arms, with the forum multiplier set to `m_forum`.
pub fn divergence_svg(m_forum: f64) -> Result<String> {
    let mut cal = frozen_calibration();
    cal.m_forum = m_forum;
    let mut runs = Vec::with_capacity(3);
    for arm in DivergenceArm::ALL {
        let cfg = cal.divergence_arm(arm);
        cfg.validate()?;
        runs.push((arm.label(), run_scenario(&cfg)?));
    }
    let refs: Vec<(&str, &Trajectory)> = runs.iter().map(|(l, t)| (*l, t)).collect();
    render_svg_chart(&divergence_chart("Welfare divergence", &refs, 0))
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    fn js(r: disempower_core::Result<String>) -> Result<String, JsError> {
        r.map_err(|e| JsError::new(&e.to_string()))
    }

    #[wasm_bindgen]
    pub fn capacity_svg(delta: f64, alpha: f64, mask: u32) -> Result<String, JsError> {
        js(super::capacity_svg(delta, alpha, mask))
    }

    #[wasm_bindgen]
    pub fn sweep_svg(n: usize, mask: u32) -> Result<String, JsError> {
        js(super::sweep_svg(n, mask))
    }

    #[wasm_bindgen]
    pub fn divergence_svg(m_forum: f64) -> Result<String, JsError> {
        js(super::divergence_svg(m_forum))
    }
}
