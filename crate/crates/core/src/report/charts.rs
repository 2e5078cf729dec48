//! Standard chart layouts for trajectories and sweeps.

use crate::analysis::SweepResult;
use crate::model::Trajectory;
use crate::report::svg::{ChartSpec, HeatmapSpec, RefLine, Series};

/// Capacity of one domain for each labelled run, with the threshold drawn
/// as a reference line.
pub fn capacity_chart(title: &str, runs: &[(&str, &Trajectory)], domain: usize, c_bar: f64) -> ChartSpec {
    ChartSpec {
        title: title.to_string(),
        x_label: "years".into(),
        y_label: "capacity".into(),
        x_range: None,
        y_range: Some((0.0, 1.0)),
        series: runs
            .iter()
            .enumerate()
            .map(|(i, (label, tr))| Series::new(*label, tr.capacity_series(domain), i))
            .collect(),
        reference: Some(RefLine {
            label: format!("threshold {c_bar:.3}"),
            y: c_bar,
        }),
    }
}

pub fn divergence_chart(title: &str, runs: &[(&str, &Trajectory)], domain: usize) -> ChartSpec {
    ChartSpec {
        title: title.to_string(),
        x_label: "years".into(),
        y_label: "welfare divergence".into(),
        x_range: None,
        y_range: Some((0.0, 1.0)),
        series: runs
            .iter()
            .enumerate()
            .map(|(i, (label, tr))| Series::new(*label, tr.divergence_series(domain), i))
            .collect(),
        reference: None,
    }
}

/// Crossing years over the grid: delta on the vertical axis, alpha across.
pub fn sweep_heatmap(result: &SweepResult) -> HeatmapSpec {
    HeatmapSpec {
        title: format!("Crossing year, {}", result.scenario),
        x_label: "alpha".into(),
        y_label: "delta".into(),
        x_values: result.alpha_values.clone(),
        y_values: result.delta_values.clone(),
        cells: result.cells.iter().map(|c| c.crossing_year).collect(),
        value_label: "years".into(),
        none_label: "none".into(),
    }
}
