use crate::error::{invalid_arg, invalid_param, Result};
use crate::model::{celsius_to_kelvin, ThermalModel};

/// Gaussian noise magnitudes for the altitude channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Laser rangefinder standard deviation, m.
    pub sigma_laser: f64,
    /// Accelerometer standard deviation, m/s².
    pub sigma_imu: f64,
    /// Mean of the thermal acceleration disturbance, m/s² (negative: lift loss).
    pub thermal_mean: f64,
    pub sigma_thermal: f64,
    /// Disturbance range (most negative, least negative), m/s².
    pub thermal_bounds: (f64, f64),
    /// Set when the temperature range collapsed to a single value.
    pub degenerate: bool,
}

impl NoiseModel {
    /// All noise off; useful for deterministic plant runs.
    pub fn silent() -> Self {
        Self {
            sigma_laser: 0.0,
            sigma_imu: 0.0,
            thermal_mean: 0.0,
            sigma_thermal: 0.0,
            thermal_bounds: (0.0, 0.0),
            degenerate: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma_laser", self.sigma_laser),
            ("sigma_imu", self.sigma_imu),
            ("sigma_thermal", self.sigma_thermal),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid_param(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if !self.thermal_mean.is_finite() {
            return Err(invalid_param("thermal_mean", "must be finite"));
        }
        Ok(())
    }
}

/// Turns sensor accuracy bounds and a crater temperature range into the
/// Gaussian noise model.
///
/// Each ± bound is treated as a 3σ envelope. The thermal disturbance is the
/// per-unit-mass hover-thrust loss across the temperature range, modelled
/// as a Gaussian centred on the mid-range with σ = half-range / 3.
pub fn build_noise_model(
    t_low_c: f64,
    t_high_c: f64,
    hover_thrust_nominal: f64,
    mass: f64,
    laser_bound: f64,
    imu_bound: f64,
) -> Result<NoiseModel> {
    if !(t_low_c.is_finite() && t_high_c.is_finite()) || t_low_c <= -273.15 {
        return Err(invalid_arg(
            "temperature",
            format!("temperatures must be finite and above absolute zero, got ({t_low_c}, {t_high_c})"),
        ));
    }
    if t_high_c < t_low_c {
        return Err(invalid_arg(
            "temperature",
            format!("t_high ({t_high_c}) must not be below t_low ({t_low_c})"),
        ));
    }
    for (name, v) in [("laser_bound", laser_bound), ("imu_bound", imu_bound), ("mass", mass)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid_arg(name, format!("must be finite and > 0, got {v}")));
        }
    }
    let thermal = ThermalModel::at(hover_thrust_nominal, celsius_to_kelvin(t_low_c))?;
    let loss_low = (hover_thrust_nominal - thermal.delivered_hover_thrust()) / mass;
    let hot = thermal.with_temperature(celsius_to_kelvin(t_high_c))?;
    let loss_high = (hover_thrust_nominal - hot.delivered_hover_thrust()) / mass;

    let bounds = (-loss_high, -loss_low);
    let half_range = (bounds.1 - bounds.0) / 2.0;
    Ok(NoiseModel {
        sigma_laser: laser_bound / 3.0,
        sigma_imu: imu_bound / 3.0,
        thermal_mean: (bounds.0 + bounds.1) / 2.0,
        sigma_thermal: half_range / 3.0,
        thermal_bounds: bounds,
        degenerate: t_high_c == t_low_c,
    })
}
