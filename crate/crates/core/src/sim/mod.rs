//! Closed-loop simulation.

mod config;
mod hover;
pub mod integrator;
mod log;
mod mission;

pub use config::{Scenario, SimConfig, Temperature, ThermalMode};
pub use hover::run_hover_estimation;
pub use log::{EstimatorTrace, SimLog, SimRow, StopReason};
pub use mission::{plant_derivative, run_mission, run_open_loop};

/// Time of output sample `k`. Divides by an integral rate when there is
/// one, so that e.g. `k * 0.05` prints as `7.6`, not `7.6000000000000005`.
pub(crate) fn grid_time(k: usize, interval: f64) -> f64 {
    let rate = 1.0 / interval;
    if rate >= 1.0 && (rate - rate.round()).abs() < 1e-9 * rate {
        k as f64 / rate.round()
    } else {
        k as f64 * interval
    }
}

/// Runs whichever scenario the configuration selects.
pub fn run(config: &SimConfig) -> crate::Result<SimLog> {
    match config.scenario {
        Scenario::Nominal => run_mission(config),
        Scenario::VolcanoHover => run_hover_estimation(config),
    }
}
