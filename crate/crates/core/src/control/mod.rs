//! Altitude state feedback, PD attitude control and thrust allocation.

mod altitude;
mod attitude;
mod mixer;

pub use altitude::{
    altitude_control, chasing_gain, equal_motor_input, place_poles, place_real_poles,
    AltitudeDesign,
};
pub use attitude::{attitude_control, desired_attitude, AttitudeGains, AttitudeSetpoint};
pub use mixer::{mix_and_saturate, moment_to_thrusts, Mixer};
