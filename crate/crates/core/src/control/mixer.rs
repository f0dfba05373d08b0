use nalgebra::{Matrix3, Matrix3x4, Matrix4x3, Vector3, Vector4};

use crate::model::{mixing_matrix, QuadrotorParams, ThrustCommand};

/// Minimum-norm allocation of body moments to motor thrusts.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixer {
    mix: Matrix3x4<f64>,
    pinv: Matrix4x3<f64>,
    f_max: f64,
}

impl Mixer {
    pub fn new(params: &QuadrotorParams) -> Self {
        let mix = mixing_matrix(params);
        // Full row rank for L > 0, γ > 0, so pinv = Mᵀ (M Mᵀ)⁻¹.
        let gram: Matrix3<f64> = mix * mix.transpose();
        let gram_inv = gram.try_inverse().expect("mixing matrix has full row rank");
        Self {
            mix,
            pinv: mix.transpose() * gram_inv,
            f_max: params.f_max(),
        }
    }

    pub fn mixing(&self) -> &Matrix3x4<f64> {
        &self.mix
    }

    pub fn pseudo_inverse(&self) -> &Matrix4x3<f64> {
        &self.pinv
    }

    pub fn allocate(&self, moment: &Vector3<f64>) -> Vector4<f64> {
        self.pinv * moment
    }

    /// Adds both contributions per motor and clips to `[0, f_max]`.
    pub fn combine(&self, u_altitude: &Vector4<f64>, u_attitude: &Vector4<f64>) -> ThrustCommand {
        let raw = u_altitude + u_attitude;
        let mut saturated = [false; 4];
        let f = Vector4::from_fn(|i, _| {
            let v = raw[i].clamp(0.0, self.f_max);
            saturated[i] = v != raw[i];
            v
        });
        ThrustCommand { f, saturated }
    }
}

pub fn moment_to_thrusts(moment: &Vector3<f64>, params: &QuadrotorParams) -> Vector4<f64> {
    Mixer::new(params).allocate(moment)
}

pub fn mix_and_saturate(u_altitude: &Vector4<f64>, u_attitude: &Vector4<f64>, params: &QuadrotorParams) -> ThrustCommand {
    Mixer::new(params).combine(u_altitude, u_attitude)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_moment() {
        let p = QuadrotorParams::default();
        assert_eq!(moment_to_thrusts(&Vector3::zeros(), &p), Vector4::zeros());
    }

    #[test]
    fn yaw_moment_matches_least_squares_oracle() {
        let p = QuadrotorParams::default();
        let got = moment_to_thrusts(&Vector3::new(0.0, 0.0, 1.0), &p);
        let expected = Vector4::new(1.0, -1.0, 1.0, -1.0) / (4.0 * p.gamma());
        assert!((got - expected).amax() < 1e-9);

        let oracle = mixing_matrix(&p)
            .svd(true, true)
            .solve(&Vector3::new(0.0, 0.0, 1.0), 1e-15)
            .unwrap();
        assert!((got - oracle).amax() < 1e-9 * oracle.amax());
    }

    #[test]
    fn saturation_stage() {
        let p = QuadrotorParams::default();
        let hover = Vector4::repeat(p.hover_thrust() / 4.0);
        let cmd = mix_and_saturate(&hover, &Vector4::zeros(), &p);
        assert_eq!(cmd.f, hover);
        assert!(!cmd.any_saturated());

        let cmd = mix_and_saturate(&Vector4::new(5.0, 0.1, -0.3, 0.2), &Vector4::new(0.0, 0.0, 0.1, 0.0), &p);
        assert!((cmd.f[0] - 0.8829).abs() < 1e-12);
        assert_eq!(cmd.f[2], 0.0);
        assert_eq!(cmd.saturated, [true, false, true, false]);
    }

    proptest! {
        #[test]
        fn reconstructs_and_stays_in_null_space(m in proptest::array::uniform3(-2.0f64..2.0)) {
            let p = QuadrotorParams::default();
            let moment = Vector3::from(m);
            let f = moment_to_thrusts(&moment, &p);
            prop_assert!((mixing_matrix(&p) * f - moment).amax() < 1e-10);
            prop_assert!(f.sum().abs() < 1e-10);
        }
    }
}
