//! `key = value` text reports. Numbers use the shortest representation
//! that parses back to the same value.

use std::fmt::Write;

use nalgebra::Complex;

use vq_core::control::AltitudeDesign;
use vq_core::estimation::{EstimatorDesign, NoiseModel};
use vq_core::lag::{closed_form_lag, discretized_lag, LagResult, VelocityProfile};
use vq_core::model::QuadrotorParams;

use crate::CliError;

fn line(out: &mut String, key: &str, values: &[f64]) {
    let vals: Vec<String> = values.iter().map(|v| format!("{v}")).collect();
    let _ = writeln!(out, "{key} = {}", vals.join(" "));
}

fn complex(out: &mut String, key: &str, z: Complex<f64>) {
    line(out, key, &[z.re, z.im]);
}

pub fn design_report(
    params: &QuadrotorParams,
    altitude: &AltitudeDesign,
    noise: &NoiseModel,
    kalman: &EstimatorDesign,
) -> String {
    let mut out = String::new();
    line(&mut out, "quadrotor.mass", &[params.mass()]);
    line(&mut out, "quadrotor.gamma", &[params.gamma()]);
    line(&mut out, "quadrotor.f_max", &[params.f_max()]);
    line(&mut out, "altitude.poles", &altitude.poles);
    line(&mut out, "altitude.target_height", &[altitude.target_height]);
    for i in 0..4 {
        line(&mut out, &format!("altitude.k[{}]", i + 1), &[altitude.k[(i, 0)], altitude.k[(i, 1)]]);
    }
    for i in 0..4 {
        line(&mut out, &format!("altitude.n[{}]", i + 1), &[altitude.n[(i, 0)], altitude.n[(i, 1)]]);
    }
    let mut poles = altitude.closed_loop_poles();
    poles.sort_by(|a, b| a.re.total_cmp(&b.re));
    for (i, p) in poles.iter().enumerate() {
        complex(&mut out, &format!("altitude.eigenvalue[{}]", i + 1), *p);
    }
    line(&mut out, "noise.sigma_laser", &[noise.sigma_laser]);
    line(&mut out, "noise.sigma_imu", &[noise.sigma_imu]);
    line(&mut out, "noise.thermal_mean", &[noise.thermal_mean]);
    line(&mut out, "noise.sigma_thermal", &[noise.sigma_thermal]);
    line(&mut out, "noise.thermal_bounds", &[noise.thermal_bounds.0, noise.thermal_bounds.1]);
    let _ = writeln!(out, "noise.degenerate = {}", noise.degenerate);
    for i in 0..2 {
        line(&mut out, &format!("kalman.kf[{}]", i + 1), &[kalman.kf[(i, 0)], kalman.kf[(i, 1)]]);
    }
    for i in 0..2 {
        line(&mut out, &format!("kalman.p[{}]", i + 1), &[kalman.p[(i, 0)], kalman.p[(i, 1)]]);
    }
    line(&mut out, "kalman.riccati_residual", &[kalman.riccati_residual(&kalman.p).amax()]);
    line(&mut out, "kalman.solver_gap", &[(kalman.p - kalman.p_check).amax()]);
    let mut obs = kalman.observer_poles();
    obs.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    for (i, p) in obs.iter().enumerate() {
        complex(&mut out, &format!("kalman.observer_pole[{}]", i + 1), *p);
    }
    out
}

fn lag_lines(out: &mut String, prefix: &str, r: &LagResult) {
    line(out, &format!("{prefix}.lag"), &[r.lag]);
    line(out, &format!("{prefix}.accomplishment"), &[r.accomplishment]);
}

pub const LADDER: [usize; 4] = [100, 1_000, 10_000, 100_000];

pub fn lag_report(lambda: f64, v_final: f64, t_total: f64, n: Option<usize>) -> Result<String, CliError> {
    let cfg = |e: vq_core::Error| CliError::Config(e.to_string());
    let profile = VelocityProfile::UniformAcceleration { v_final, t_total };
    let closed = closed_form_lag(lambda, v_final, t_total).map_err(cfg)?;
    let mut out = String::new();
    line(&mut out, "lambda", &[lambda]);
    line(&mut out, "v_final", &[v_final]);
    line(&mut out, "t_total", &[t_total]);
    let steps: Vec<usize> = match n {
        Some(n) => vec![n],
        None => LADDER.to_vec(),
    };
    for n in steps {
        let r = discretized_lag(lambda, &profile, n).map_err(cfg)?;
        lag_lines(&mut out, &format!("discretized[{n}]"), &r);
    }
    lag_lines(&mut out, "closed_form", &closed);
    Ok(out)
}
