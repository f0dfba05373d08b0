use nalgebra::{Vector2, Vector3, Vector4};

use super::log::{EstimatorTrace, SimLog, SimRow, StopReason};
use super::{Scenario, SimConfig, Temperature, ThermalMode};
use crate::control::{altitude_control, AltitudeDesign, Mixer};
use crate::error::{invalid_arg, Result};
use crate::estimation::{design_kalman_gain, estimator_step, sample_thermal_disturbance, simulate_sensors, SensorRng};
use crate::model::EulerAngles;

/// Altitude-only climb to `hover_height` with the Kalman estimate closing
/// the loop and an additive thermal disturbance on the plant.
pub fn run_hover_estimation(config: &SimConfig) -> Result<SimLog> {
    config.validate()?;
    if config.scenario != Scenario::VolcanoHover {
        return Err(invalid_arg("scenario", "run_hover_estimation needs the volcano-hover scenario"));
    }
    let params = &config.params;
    let design_noise = config.noise.expect("checked by validate");
    let plant_noise = config.effective_plant_noise().expect("checked by validate");
    let design = design_kalman_gain(&design_noise, params.mass(), params.gravity())?;
    let h = config.target_height.unwrap_or(config.hover_height);
    let altitude = AltitudeDesign::new(params, config.poles, h)?;
    let mixer = Mixer::new(params);

    let dt = config.estimator_dt;
    let per_output = (config.output_interval / dt).round();
    if per_output < 1.0 || (per_output * dt - config.output_interval).abs() > 1e-9 * config.output_interval.max(1.0) {
        return Err(invalid_arg(
            "output_interval",
            format!("must be a whole multiple of estimator_dt ({dt})"),
        ));
    }
    let per_output = per_output as usize;
    let n_out = (config.max_time / config.output_interval - 1e-9).ceil() as usize;
    let n_steps = n_out * per_output;

    let mut warnings = Vec::new();
    if config.temperature != Temperature::Nominal {
        warnings.push("temperature is ignored in the hover scenario; the noise model carries the heat".into());
    }

    let mut rng = SensorRng::seed_from_u64(config.seed);
    let held_disturbance = match config.thermal_mode {
        ThermalMode::Constant => Some(sample_thermal_disturbance(&plant_noise, &mut rng)),
        ThermalMode::White => None,
    };
    let reference = Vector2::new(h, 0.0);
    let (m, g) = (params.mass(), params.gravity());
    let (mut z, mut zdot) = (0.0, 0.0);
    let mut est = Vector2::zeros();
    let mut rows = Vec::with_capacity(n_out + 1);

    for k in 0..=n_steps {
        let t = k as f64 * dt;
        let cmd = mixer.combine(&altitude_control(&est, &reference, &altitude), &Vector4::zeros());
        let disturbance = match held_disturbance {
            Some(d) => d,
            None => sample_thermal_disturbance(&plant_noise, &mut rng),
        };
        let acc = cmd.total() / m - g + disturbance;
        let meas = simulate_sensors(z, acc, &plant_noise, &mut rng);

        if k % per_output == 0 {
            rows.push(SimRow {
                t: super::grid_time(k / per_output, config.output_interval),
                position: Vector3::new(0.0, 0.0, z),
                velocity: Vector3::new(0.0, 0.0, zdot),
                attitude: EulerAngles::default(),
                body_rates: Vector3::zeros(),
                thrust: cmd.f,
                saturated: cmd.saturated,
                reference: Some(Vector3::new(0.0, 0.0, h)),
                gamma: [params.gamma(); 4],
                estimator: Some(EstimatorTrace {
                    z_meas: meas.z,
                    z_hat: est.x,
                    zdot_hat: est.y,
                }),
            });
        }
        if k == n_steps {
            break;
        }
        est = estimator_step(&est, &meas, cmd.total(), &design, dt)?;
        // Exact under the acceleration held over the step.
        z += zdot * dt + 0.5 * acc * dt * dt;
        zdot += acc * dt;
        if !(z.is_finite() && zdot.is_finite()) {
            return Err(crate::Error::Simulation {
                t,
                reason: "non-finite altitude".into(),
            });
        }
    }
    Ok(SimLog {
        scenario: Scenario::VolcanoHover,
        rows,
        stop_reason: StopReason::MaxTime,
        warnings,
        evaluations: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::NoiseModel;
    use proptest::prelude::*;

    fn rms(v: impl Iterator<Item = f64>) -> f64 {
        let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x * x, n + 1));
        (s / n as f64).sqrt()
    }

    #[test]
    fn noiseless_compensated_run_settles_on_target() {
        let mut config = SimConfig::volcano_hover();
        let mut design = config.noise.unwrap();
        design.thermal_mean = 0.0;
        config.noise = Some(design);
        config.plant_noise = Some(NoiseModel::silent());
        config.max_time = 20.0;
        let log = run_hover_estimation(&config).unwrap();
        for row in &log.rows {
            let e = row.estimator.unwrap();
            assert!((e.z_hat - row.position.z).abs() < 1e-9, "t={} {}", row.t, e.z_hat - row.position.z);
            assert!((e.zdot_hat - row.velocity.z).abs() < 1e-9);
        }
        let end = log.final_row().unwrap();
        assert!((end.position.z - 1.0).abs() < 1e-3);
    }

    #[test]
    fn seeded_run_hovers_and_filters() {
        let config = SimConfig::volcano_hover();
        let log = run_hover_estimation(&config).unwrap();
        assert_eq!(log.rows.len(), 601);
        let tail: Vec<&SimRow> = log.rows.iter().filter(|r| r.t >= 20.0).collect();
        let mean = tail.iter().map(|r| r.position.z).sum::<f64>() / tail.len() as f64;
        assert!((mean - 1.0).abs() < 0.05, "{mean}");
        let settled = log.rows.iter().filter(|r| r.t >= 5.0);
        let est_rms = rms(settled.clone().map(|r| r.estimator.unwrap().z_hat - r.position.z));
        let meas_rms = rms(settled.map(|r| r.estimator.unwrap().z_meas - r.position.z));
        assert!(est_rms < meas_rms, "{est_rms} vs {meas_rms}");
    }

    #[test]
    fn same_seed_same_log() {
        let config = SimConfig::volcano_hover();
        let a = run_hover_estimation(&config).unwrap();
        let b = run_hover_estimation(&config).unwrap();
        assert_eq!(a, b);
        let mut other = config.clone();
        other.seed = 1;
        assert_ne!(a, run_hover_estimation(&other).unwrap());
    }

    #[test]
    fn constant_disturbance_mode() {
        let mut config = SimConfig::volcano_hover();
        config.thermal_mode = ThermalMode::Constant;
        let log = run_hover_estimation(&config).unwrap();
        let end = log.final_row().unwrap();
        assert!((end.position.z - 1.0).abs() < 0.05);
    }

    #[test]
    fn misaligned_output_grid_is_rejected() {
        let mut config = SimConfig::volcano_hover();
        config.output_interval = 0.0505;
        assert!(run_hover_estimation(&config).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn any_seed_respects_log_invariants(seed in any::<u64>()) {
            let mut config = SimConfig::volcano_hover();
            config.seed = seed;
            config.max_time = 5.0;
            let log = run_hover_estimation(&config).unwrap();
            let f_max = config.params.f_max();
            for (i, row) in log.rows.iter().enumerate() {
                prop_assert!((row.t - i as f64 * config.output_interval).abs() < 1e-12);
                prop_assert!(row.thrust.iter().all(|&f| (0.0..=f_max).contains(&f)));
                prop_assert!(row.fields().iter().flatten().all(|v| v.is_finite()));
            }
        }
    }
}
