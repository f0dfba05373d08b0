use nalgebra::{Vector2, Vector3};

use crate::error::{invalid_param, Result};
use crate::model::{EulerAngles, RigidBodyState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeGains {
    /// Roll, pitch, yaw proportional gains, N·m/rad.
    pub kp: Vector3<f64>,
    /// Roll, pitch, yaw rate gains, N·m·s/rad.
    pub kd: Vector3<f64>,
}

impl AttitudeGains {
    pub fn new(kp: Vector3<f64>, kd: Vector3<f64>) -> Result<Self> {
        if kp.iter().chain(kd.iter()).any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(invalid_param("attitude_gains", "all gains must be finite and > 0"));
        }
        Ok(Self { kp, kd })
    }
}

impl Default for AttitudeGains {
    fn default() -> Self {
        Self {
            kp: Vector3::new(200.0, 200.0, 500.0),
            kd: Vector3::new(10.0, 10.0, 10.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AttitudeSetpoint {
    pub angles: EulerAngles,
    pub rates: Vector3<f64>,
}

/// Roll and pitch that produce the horizontal acceleration `acc_ref`
/// under the hover-thrust small-angle model, for heading `psi0`.
pub fn desired_attitude(acc_ref: &Vector2<f64>, psi0: f64, g: f64) -> (f64, f64) {
    let (s, c) = psi0.sin_cos();
    let roll = (acc_ref.x * s - acc_ref.y * c) / g;
    let pitch = (acc_ref.x * c + acc_ref.y * s) / g;
    (roll, pitch)
}

/// Component-wise PD law on angle and body-rate errors.
pub fn attitude_control(state: &RigidBodyState, desired: &AttitudeSetpoint, gains: &AttitudeGains) -> Vector3<f64> {
    let angle_err = desired.angles.as_vector() - state.attitude.as_vector();
    let rate_err = desired.rates - state.body_rates;
    gains.kp.component_mul(&angle_err) + gains.kd.component_mul(&rate_err)
}
