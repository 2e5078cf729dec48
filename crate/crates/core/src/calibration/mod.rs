//! Fitting model parameters to observed series and searching calibration
//! knobs against target bands.

pub mod bands;
pub mod fit;
pub mod series;

pub use bands::{
    calibrate_to_bands, shipped_targets, BandFit, BandTarget, Knob, KnobRange, Metric, TargetValue,
};
pub use fit::{fit_decay_rate, fit_params, implied_change, FitModel, FitParam, FitResult, FreeParam};
pub use series::{read_series_csv, CapacitySeries, Observation};

/// Bundled budget case-study series: prevention spending in billions of
/// constant 2020 dollars and as a share of federal spending, 2007 and 2024.
pub const BUDGET_FIXTURE_CSV: &str = include_str!("../../fixtures/budget_d3.csv");

/// The spending series of the bundled fixture.
pub fn budget_fixture() -> CapacitySeries {
    read_series_csv(BUDGET_FIXTURE_CSV)
        .expect("bundled fixture parses")
        .into_iter()
        .find(|s| s.label == "prevention_spending")
        .expect("fixture has a spending series")
}
