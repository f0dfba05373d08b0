use nalgebra::{Complex, DMatrix, Matrix1, Matrix2, RowVector2, Vector2};

use super::riccati::{solve_care, solve_care_newton_kleinman};
use super::{Measurement, NoiseModel};
use crate::error::{invalid_arg, Error, Result};

/// Steady-state Kalman design for the altitude channel.
///
/// State `[z, ż]`, process noise enters the acceleration; the laser measures
/// `z`, the accelerometer measures the acceleration, which carries the same
/// thermal noise as the dynamics. That shared term is the cross-covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorDesign {
    pub a: Matrix2<f64>,
    pub g_noise: Vector2<f64>,
    pub c: Matrix2<f64>,
    pub q_proc: f64,
    pub r_meas: Matrix2<f64>,
    pub n_cross: RowVector2<f64>,
    pub kf: Matrix2<f64>,
    /// Stabilising solution of the filter Riccati equation.
    pub p: Matrix2<f64>,
    /// Same equation solved by Newton–Kleinman, kept for cross-checking.
    pub p_check: Matrix2<f64>,
    /// Known acceleration offset, `-g + thermal_mean`, m/s².
    pub bias: f64,
    pub mass: f64,
}

impl EstimatorDesign {
    /// `A P + P Aᵀ + G Q Gᵀ − (P Cᵀ + G N) R⁻¹ (P Cᵀ + G N)ᵀ`
    pub fn riccati_residual(&self, p: &Matrix2<f64>) -> Matrix2<f64> {
        let r_inv = self.r_meas.try_inverse().expect("R checked at design time");
        let cross = p * self.c.transpose() + self.g_noise * self.n_cross;
        self.a * p + p * self.a.transpose() + self.g_noise * self.q_proc * self.g_noise.transpose()
            - cross * r_inv * cross.transpose()
    }

    /// Error dynamics of the observer, `A − Kf·C`.
    pub fn error_dynamics(&self) -> Matrix2<f64> {
        self.a - self.kf * self.c
    }

    pub fn observer_poles(&self) -> Vec<Complex<f64>> {
        self.error_dynamics().complex_eigenvalues().iter().copied().collect()
    }

    /// Largest observer pole magnitude, 1/s.
    pub fn fastest_rate(&self) -> f64 {
        self.observer_poles().iter().map(|p| p.norm()).fold(0.0, f64::max)
    }
}

pub fn design_kalman_gain(noise: &NoiseModel, mass: f64, gravity: f64) -> Result<EstimatorDesign> {
    noise.validate()?;
    if !(mass.is_finite() && mass > 0.0) {
        return Err(invalid_arg("mass", format!("must be > 0, got {mass}")));
    }
    let a = Matrix2::new(0.0, 1.0, 0.0, 0.0);
    let g_noise = Vector2::new(0.0, 1.0);
    let c = Matrix2::new(1.0, 0.0, 0.0, 0.0);
    let q_th = noise.sigma_thermal.powi(2);
    let r_meas = Matrix2::new(noise.sigma_laser.powi(2), 0.0, 0.0, noise.sigma_imu.powi(2) + q_th);
    let n_cross = RowVector2::new(0.0, q_th);

    let r_inv = r_meas
        .cholesky()
        .map(|ch| ch.inverse())
        .ok_or_else(|| Error::Design("measurement covariance R must be positive definite".into()))?;

    // Decorrelate: Ā = A − G N R⁻¹ C, Q̄ = Q − N R⁻¹ Nᵀ.
    let a_bar = a - g_noise * n_cross * r_inv * c;
    let q_bar = q_th - (n_cross * r_inv * n_cross.transpose())[(0, 0)];
    if q_bar < -1e-15 {
        return Err(Error::Design("decorrelated process noise is negative".into()));
    }
    let q_bar = q_bar.max(0.0);

    // Filter equation in control form: (Āᵀ, Cᵀ, G Q̄ Gᵀ, R).
    let to_d = |m: &Matrix2<f64>| DMatrix::from_column_slice(2, 2, m.as_slice());
    let care_a = to_d(&a_bar.transpose());
    let care_b = to_d(&c.transpose());
    let care_q = to_d(&(g_noise * Matrix1::new(q_bar) * g_noise.transpose()));
    let care_r = to_d(&r_meas);
    let p = solve_care(&care_a, &care_b, &care_q, &care_r)?;
    let p_check = solve_care_newton_kleinman(&care_a, &care_b, &care_q, &care_r, None, 1e-15)?;
    let p = Matrix2::from_column_slice(p.as_slice());
    let p_check = Matrix2::from_column_slice(p_check.as_slice());

    let kf = (p * c.transpose() + g_noise * n_cross) * r_inv;
    let design = EstimatorDesign {
        a,
        g_noise,
        c,
        q_proc: q_th,
        r_meas,
        n_cross,
        kf,
        p,
        p_check,
        bias: -gravity + noise.thermal_mean,
        mass,
    };
    if design.observer_poles().iter().any(|p| p.re >= 0.0) {
        return Err(Error::Design("observer is not stable".into()));
    }
    Ok(design)
}

/// One step of the continuous observer.
///
/// The model part is propagated exactly for an acceleration held over the
/// step; the innovation correction enters as an Euler term. The laser
/// channel is predicted from the state, the accelerometer channel from the
/// applied thrust and known bias.
pub fn estimator_step(
    est: &Vector2<f64>,
    meas: &Measurement,
    thrust_sum: f64,
    design: &EstimatorDesign,
    dt: f64,
) -> Result<Vector2<f64>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid_arg("dt", format!("must be > 0, got {dt}")));
    }
    if dt * design.fastest_rate() >= 0.5 {
        return Err(invalid_arg(
            "dt",
            format!("step {dt} s too large for observer rate {:.3} 1/s", design.fastest_rate()),
        ));
    }
    let model_acc = thrust_sum / design.mass + design.bias;
    let predicted = Vector2::new(est.x, model_acc);
    let innovation = Vector2::new(meas.z, meas.zdd) - predicted;
    let propagated = Vector2::new(est.x + est.y * dt + 0.5 * model_acc * dt * dt, est.y + model_acc * dt);
    Ok(propagated + design.kf * innovation * dt)
}
