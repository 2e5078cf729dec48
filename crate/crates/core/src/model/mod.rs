//! Coupled capacity / delegation / salience / value dynamics.

pub mod dynamics;
pub mod params;
pub mod schedule;
pub mod simulate;
pub mod state;

/// Number of coupled domains.
pub const DOMAINS: usize = 3;

pub use dynamics::{
    capacity_step, delegation_fraction, salience_step, system_step, usage_indicator, value_step,
    welfare_divergence,
};
pub use params::{uniform_coupling, CouplingMatrix, ModelParams};
pub use schedule::SalienceSchedule;
pub use simulate::{run_to_end, simulate, Sample, Trajectory};
pub use state::{Domain, DomainState, SystemState};
