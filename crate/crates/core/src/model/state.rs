use std::f64::consts::FRAC_PI_2;

use nalgebra::{Vector3, Vector4};

use crate::error::{invalid_arg, Result};

/// Z-X-Y Euler angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EulerAngles {
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

impl EulerAngles {
    pub fn new(roll: f64, pitch: f64, yaw: f64) -> Self {
        Self { roll, pitch, yaw }
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.roll, self.pitch, self.yaw)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

/// Kinematic state of the vehicle at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RigidBodyState {
    /// World frame, metres.
    pub position: Vector3<f64>,
    /// World frame, m/s.
    pub velocity: Vector3<f64>,
    pub attitude: EulerAngles,
    /// Body-frame angular velocity (p, q, r), rad/s.
    pub body_rates: Vector3<f64>,
}

impl RigidBodyState {
    /// Number of scalars in the packed integration vector.
    pub const DIM: usize = 12;

    pub fn at_rest(position: Vector3<f64>) -> Self {
        Self {
            position,
            ..Self::default()
        }
    }

    /// Checks finiteness and keeps both tilt angles off the Euler-rate
    /// singularity.
    pub fn validate(&self) -> Result<()> {
        let finite = self
            .position
            .iter()
            .chain(self.velocity.iter())
            .chain(self.body_rates.iter())
            .chain(self.attitude.as_vector().iter())
            .all(|v| v.is_finite());
        if !finite {
            return Err(invalid_arg("state", "all components must be finite"));
        }
        if self.attitude.pitch.abs() >= FRAC_PI_2 {
            return Err(invalid_arg("state.attitude.pitch", "|pitch| must be < pi/2"));
        }
        if self.attitude.roll.abs() >= FRAC_PI_2 {
            return Err(invalid_arg("state.attitude.roll", "|roll| must be < pi/2"));
        }
        Ok(())
    }

    pub fn to_array(&self) -> [f64; Self::DIM] {
        let a = self.attitude;
        [
            self.position.x,
            self.position.y,
            self.position.z,
            self.velocity.x,
            self.velocity.y,
            self.velocity.z,
            a.roll,
            a.pitch,
            a.yaw,
            self.body_rates.x,
            self.body_rates.y,
            self.body_rates.z,
        ]
    }

    pub fn from_array(v: &[f64; Self::DIM]) -> Self {
        Self {
            position: Vector3::new(v[0], v[1], v[2]),
            velocity: Vector3::new(v[3], v[4], v[5]),
            attitude: EulerAngles::new(v[6], v[7], v[8]),
            body_rates: Vector3::new(v[9], v[10], v[11]),
        }
    }
}

/// Per-motor thrusts in newtons, motors 1..4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThrustCommand {
    pub f: Vector4<f64>,
    /// Set per motor when the saturation stage clipped the request.
    pub saturated: [bool; 4],
}

impl ThrustCommand {
    pub fn new(f: Vector4<f64>) -> Self {
        Self {
            f,
            saturated: [false; 4],
        }
    }

    pub fn zero() -> Self {
        Self::new(Vector4::zeros())
    }

    pub fn total(&self) -> f64 {
        self.f.sum()
    }

    pub fn any_saturated(&self) -> bool {
        self.saturated.iter().any(|&s| s)
    }

    /// Same command with every thrust multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            f: self.f * factor,
            saturated: self.saturated,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_roundtrip() {
        let s = RigidBodyState {
            position: Vector3::new(1.0, 2.0, 3.0),
            velocity: Vector3::new(4.0, 5.0, 6.0),
            attitude: EulerAngles::new(0.1, 0.2, 0.3),
            body_rates: Vector3::new(7.0, 8.0, 9.0),
        };
        assert_eq!(RigidBodyState::from_array(&s.to_array()), s);
    }

    #[test]
    fn validation() {
        assert!(RigidBodyState::default().validate().is_ok());
        let mut s = RigidBodyState::default();
        s.attitude.pitch = FRAC_PI_2;
        assert!(s.validate().is_err());
        let mut s = RigidBodyState::default();
        s.velocity.y = f64::INFINITY;
        assert!(s.validate().is_err());
    }
}
