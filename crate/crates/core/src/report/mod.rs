//! Serialization: scenario configs, trajectory CSV, summary JSON and SVG
//! charts.

pub mod charts;
pub mod config;
pub mod csv;
pub mod summary;
pub mod svg;

pub use charts::{capacity_chart, divergence_chart, sweep_heatmap};
pub use config::{parse_scenario, ScenarioConfig, DEFAULT_HORIZON_YEARS};
pub use csv::{parse_trajectory_csv, sig9, write_trajectory_csv, TrajectoryRow, TRAJECTORY_HEADER};
pub use summary::{parse_summary_json, write_summary_json, Report, Summary, SUMMARY_SCHEMA};
pub use svg::{render_svg_chart, render_svg_heatmap, ChartSpec, HeatmapSpec, RefLine, Series};
