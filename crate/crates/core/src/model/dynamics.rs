use nalgebra::{Matrix3, Matrix3x4, Vector3};

use super::{EulerAngles, QuadrotorParams, RigidBodyState, ThermalModel, ThrustCommand};
use crate::error::{invalid_arg, Result};

/// Body-to-world rotation for Z-X-Y Euler angles: `Rz(yaw) * Rx(roll) * Ry(pitch)`.
pub fn rotation_zxy(att: &EulerAngles) -> Matrix3<f64> {
    let (sphi, cphi) = att.roll.sin_cos();
    let (sth, cth) = att.pitch.sin_cos();
    let (spsi, cpsi) = att.yaw.sin_cos();
    Matrix3::new(
        cpsi * cth - sphi * spsi * sth,
        -cphi * spsi,
        cpsi * sth + cth * sphi * spsi,
        cth * spsi + cpsi * sphi * sth,
        cphi * cpsi,
        spsi * sth - cpsi * cth * sphi,
        -cphi * sth,
        sphi,
        cphi * cth,
    )
}

/// Euler-angle rates from body rates for the Z-X-Y sequence.
///
/// Singular at |roll| = pi/2.
pub fn euler_rates(att: &EulerAngles, body_rates: &Vector3<f64>) -> Result<Vector3<f64>> {
    let (sphi, cphi) = att.roll.sin_cos();
    let (sth, cth) = att.pitch.sin_cos();
    if cphi.abs() < 1e-9 {
        return Err(invalid_arg("attitude.roll", "Euler-rate transform is singular"));
    }
    let (p, q, r) = (body_rates.x, body_rates.y, body_rates.z);
    let yaw_rate = (-sth * p + cth * r) / cphi;
    Ok(Vector3::new(cth * p + sth * r, q - sphi * yaw_rate, yaw_rate))
}

/// Maps motor thrusts to body moments (roll, pitch, yaw).
///
/// Rows: `[0, L, 0, -L]`, `[-L, 0, L, 0]`, `[γ, -γ, γ, -γ]`.
pub fn mixing_matrix(params: &QuadrotorParams) -> Matrix3x4<f64> {
    let l = params.arm_length();
    let g = params.gamma();
    Matrix3x4::new(
        0.0, l, 0.0, -l, //
        -l, 0.0, l, 0.0, //
        g, -g, g, -g,
    )
}

/// World-frame linear acceleration.
///
/// With a thermal model the collective thrust is scaled by the density
/// ratio before it is applied.
pub fn translational_dynamics(
    state: &RigidBodyState,
    cmd: &ThrustCommand,
    params: &QuadrotorParams,
    thermal: Option<&ThermalModel>,
) -> Vector3<f64> {
    let scale = thermal.map_or(1.0, ThermalModel::scale);
    let thrust = Vector3::new(0.0, 0.0, scale * cmd.total());
    rotation_zxy(&state.attitude) * thrust / params.mass() - Vector3::new(0.0, 0.0, params.gravity())
}

/// Body angular acceleration from Euler's rigid-body equations with the
/// full (non-diagonal) inertia tensor.
pub fn rotational_dynamics(
    state: &RigidBodyState,
    cmd: &ThrustCommand,
    params: &QuadrotorParams,
) -> Vector3<f64> {
    let w = state.body_rates;
    let moments = mixing_matrix(params) * cmd.f;
    let gyro = w.cross(&(params.inertia() * w));
    params.inertia_inv() * (moments - gyro)
}
