use nalgebra::Matrix3;

use crate::error::{invalid_param, Result};

/// Physical constants of the airframe.
///
/// `gamma` and `f_max` are derived in the constructor and cannot drift from
/// the coefficients they come from.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadrotorParams {
    mass: f64,
    arm_length: f64,
    inertia: Matrix3<f64>,
    inertia_inv: Matrix3<f64>,
    gravity: f64,
    k_f: f64,
    k_m: f64,
    gamma: f64,
    f_max: f64,
}

impl QuadrotorParams {
    /// Reference airframe: 0.18 kg, 86 mm arms, slightly asymmetric inertia.
    pub const REFERENCE_MASS: f64 = 0.18;
    pub const REFERENCE_ARM_LENGTH: f64 = 0.086;
    pub const REFERENCE_GRAVITY: f64 = 9.81;
    /// Thrust coefficient at 25 °C, N/rpm².
    pub const REFERENCE_K_F: f64 = 6.11e-8;
    /// Drag-moment coefficient at 25 °C, N·m/rpm².
    pub const REFERENCE_K_M: f64 = 1.5e-9;

    pub fn reference_inertia() -> Matrix3<f64> {
        Matrix3::new(
            0.00025, 0.0, 2.55e-6, //
            0.0, 0.000232, 0.0, //
            2.55e-6, 0.0, 0.0003738,
        )
    }

    pub fn new(
        mass: f64,
        arm_length: f64,
        inertia: Matrix3<f64>,
        gravity: f64,
        k_f: f64,
        k_m: f64,
    ) -> Result<Self> {
        positive("mass", mass)?;
        positive("arm_length", arm_length)?;
        positive("gravity", gravity)?;
        positive("k_f", k_f)?;
        positive("k_m", k_m)?;
        if inertia.iter().any(|v| !v.is_finite()) {
            return Err(invalid_param("inertia", "entries must be finite"));
        }
        let scale = inertia.amax();
        if (inertia - inertia.transpose()).amax() > 1e-12 * scale {
            return Err(invalid_param("inertia", "tensor must be symmetric"));
        }
        if inertia.cholesky().is_none() {
            return Err(invalid_param("inertia", "tensor must be positive definite"));
        }
        let inertia_inv = inertia
            .try_inverse()
            .ok_or_else(|| invalid_param("inertia", "tensor is singular"))?;
        Ok(Self {
            mass,
            arm_length,
            inertia,
            inertia_inv,
            gravity,
            k_f,
            k_m,
            gamma: k_m / k_f,
            f_max: 0.5 * mass * gravity,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn arm_length(&self) -> f64 {
        self.arm_length
    }

    pub fn inertia(&self) -> &Matrix3<f64> {
        &self.inertia
    }

    pub fn inertia_inv(&self) -> &Matrix3<f64> {
        &self.inertia_inv
    }

    pub fn gravity(&self) -> f64 {
        self.gravity
    }

    pub fn k_f(&self) -> f64 {
        self.k_f
    }

    pub fn k_m(&self) -> f64 {
        self.k_m
    }

    /// Drag-moment to thrust ratio of a single rotor.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Per-motor thrust ceiling, half the vehicle weight.
    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    /// Total thrust needed to hold altitude at nominal air density.
    pub fn hover_thrust(&self) -> f64 {
        self.mass * self.gravity
    }

    /// Thrust of one rotor spinning at `rpm`.
    pub fn rotor_thrust(&self, rpm: f64) -> f64 {
        self.k_f * rpm * rpm
    }

    /// Drag moment of one rotor spinning at `rpm`.
    pub fn rotor_moment(&self, rpm: f64) -> f64 {
        self.k_m * rpm * rpm
    }
}

impl Default for QuadrotorParams {
    fn default() -> Self {
        Self::new(
            Self::REFERENCE_MASS,
            Self::REFERENCE_ARM_LENGTH,
            Self::reference_inertia(),
            Self::REFERENCE_GRAVITY,
            Self::REFERENCE_K_F,
            Self::REFERENCE_K_M,
        )
        .expect("reference airframe is valid")
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid_param(name, format!("must be finite and > 0, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_airframe_derived_constants() {
        let p = QuadrotorParams::default();
        assert!((p.gamma() - p.k_m() / p.k_f()).abs() <= 1e-12 * p.gamma());
        assert!((p.f_max() - 0.5 * 0.18 * 9.81).abs() <= 1e-12 * p.f_max());
        assert!((p.f_max() - 0.8829).abs() < 1e-12);
        assert!((p.gamma() - 0.0245).abs() < 1e-4);
        assert!((p.hover_thrust() - 1.7658).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_values() {
        let i = QuadrotorParams::reference_inertia();
        assert!(QuadrotorParams::new(0.0, 0.1, i, 9.81, 1e-8, 1e-9).is_err());
        assert!(QuadrotorParams::new(1.0, -0.1, i, 9.81, 1e-8, 1e-9).is_err());
        assert!(QuadrotorParams::new(1.0, 0.1, i, f64::NAN, 1e-8, 1e-9).is_err());
        assert!(QuadrotorParams::new(1.0, 0.1, i, 9.81, 0.0, 1e-9).is_err());

        let mut asym = i;
        asym[(0, 2)] = 1e-5;
        assert!(QuadrotorParams::new(1.0, 0.1, asym, 9.81, 1e-8, 1e-9).is_err());

        let indefinite = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, -1.0, 1.0));
        assert!(QuadrotorParams::new(1.0, 0.1, indefinite, 9.81, 1e-8, 1e-9).is_err());
    }

    proptest! {
        #[test]
        fn gamma_is_rpm_independent(rpm in 1.0f64..40_000.0) {
            let p = QuadrotorParams::default();
            let ratio = p.rotor_moment(rpm) / p.rotor_thrust(rpm);
            prop_assert!((ratio - p.gamma()).abs() < 1e-12);
            prop_assert!((ratio - 0.0245).abs() < 1e-4);
        }
    }
}
