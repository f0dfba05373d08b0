//! Altitude estimation near a hot crater: noise models, Kalman gain design
//! with correlated process/measurement noise, sensor simulation and the
//! continuous observer.

mod kalman;
mod noise;
pub mod riccati;
mod sensors;

pub use kalman::{design_kalman_gain, estimator_step, EstimatorDesign};
pub use noise::{build_noise_model, NoiseModel};
pub use sensors::{sample_thermal_disturbance, simulate_sensors, Measurement, SensorRng};
