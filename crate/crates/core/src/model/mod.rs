//! Airframe parameters, rigid-body state and the plant equations.
//!
//! World frame is x/y horizontal, z up. Attitude uses Z-X-Y Euler angles
//! (yaw, then roll, then pitch), whose small-angle linearisation gives the
//! horizontal-acceleration relations used by the attitude inversion in
//! [`crate::control::desired_attitude`].

mod dynamics;
mod params;
mod state;
mod thermal;

pub use dynamics::{
    euler_rates, mixing_matrix, rotation_zxy, rotational_dynamics, translational_dynamics,
};
pub use params::QuadrotorParams;
pub use state::{EulerAngles, RigidBodyState, ThrustCommand};
pub use thermal::{celsius_to_kelvin, thermal_thrust_scale, ThermalModel, NOMINAL_TEMPERATURE_K};
