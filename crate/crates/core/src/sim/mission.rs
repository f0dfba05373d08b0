use nalgebra::{SVector, Vector2, Vector3, Vector4};

use super::integrator::Dopri5;
use super::log::{SimLog, SimRow, StopReason};
use super::{Scenario, SimConfig, Temperature};
use crate::control::{altitude_control, attitude_control, desired_attitude, AltitudeDesign, AttitudeSetpoint, Mixer};
use crate::error::{invalid_arg, Error, Result};
use crate::model::{
    euler_rates, rotational_dynamics, translational_dynamics, EulerAngles, QuadrotorParams, RigidBodyState,
    ThermalModel, ThrustCommand,
};
use crate::trajectory::plan_mission;

type State = SVector<f64, { RigidBodyState::DIM }>;

fn pack(s: &RigidBodyState) -> State {
    State::from(s.to_array())
}

fn unpack(y: &State) -> RigidBodyState {
    RigidBodyState::from_array(&(*y).into())
}

/// Time derivative of the packed 12-state.
pub fn plant_derivative(
    state: &RigidBodyState,
    cmd: &ThrustCommand,
    params: &QuadrotorParams,
    thermal: Option<&ThermalModel>,
) -> Result<[f64; RigidBodyState::DIM]> {
    let acc = translational_dynamics(state, cmd, params, thermal);
    let att_rate = euler_rates(&state.attitude, &state.body_rates)?;
    let w_dot = rotational_dynamics(state, cmd, params);
    let mut d = [0.0; RigidBodyState::DIM];
    d[0..3].copy_from_slice(state.velocity.as_slice());
    d[3..6].copy_from_slice(acc.as_slice());
    d[6..9].copy_from_slice(att_rate.as_slice());
    d[9..12].copy_from_slice(w_dot.as_slice());
    Ok(d)
}

/// Moment-to-thrust ratio each rotor produces at its commanded thrust.
fn gamma_ratios(params: &QuadrotorParams, f: &Vector4<f64>) -> [f64; 4] {
    std::array::from_fn(|i| {
        if f[i] > 0.0 {
            let rpm = (f[i] / params.k_f()).sqrt();
            params.rotor_moment(rpm) / params.rotor_thrust(rpm)
        } else {
            params.gamma()
        }
    })
}

struct Plant<'a> {
    params: &'a QuadrotorParams,
    thermal: Option<ThermalModel>,
    solver: Dopri5,
    output_interval: f64,
    control_period: Option<f64>,
}

impl Plant<'_> {
    /// Integrates on the output grid until `stop` fires or `max_time` is
    /// reached. `command` returns the thrust and the logged reference.
    fn run<C, S>(&mut self, initial: RigidBodyState, max_time: f64, mut command: C, stop: S) -> Result<(Vec<SimRow>, StopReason)>
    where
        C: FnMut(f64, &RigidBodyState) -> Result<(ThrustCommand, Option<Vector3<f64>>)>,
        S: Fn(f64, &RigidBodyState, Option<Vector3<f64>>) -> bool,
    {
        initial.validate()?;
        let params = self.params;
        let thermal = self.thermal;
        let n_out = (max_time / self.output_interval - 1e-9).ceil() as usize;
        let mut rows = Vec::with_capacity(n_out + 1);
        let mut y = pack(&initial);
        let mut held: Option<(i64, ThrustCommand)> = None;

        for k in 0..=n_out {
            let t = super::grid_time(k, self.output_interval);
            let state = unpack(&y);
            let (live, reference) = command(t, &state)?;
            let cmd = match (self.control_period, &held) {
                (Some(cp), Some((idx, c))) if *idx == (t / cp + 1e-9).floor() as i64 => *c,
                _ => live,
            };
            rows.push(SimRow {
                t,
                position: state.position,
                velocity: state.velocity,
                attitude: state.attitude,
                body_rates: state.body_rates,
                thrust: cmd.f,
                saturated: cmd.saturated,
                reference,
                gamma: gamma_ratios(params, &cmd.f),
                estimator: None,
            });
            if stop(t, &state, reference) {
                return Ok((rows, StopReason::Arrived));
            }
            if k == n_out {
                break;
            }
            let t_next = super::grid_time(k + 1, self.output_interval);
            match self.control_period {
                None => {
                    let mut rhs = |t: f64, y: &State| -> Result<State> {
                        let s = unpack(y);
                        s.validate().map_err(|e| Error::Simulation { t, reason: e.to_string() })?;
                        let (c, _) = command(t, &s)?;
                        plant_derivative(&s, &c, params, thermal.as_ref()).map(State::from)
                    };
                    y = self.solver.integrate(&mut rhs, t, t_next, y)?;
                }
                Some(cp) => {
                    let mut t0 = t;
                    while t0 < t_next {
                        let idx = (t0 / cp + 1e-9).floor() as i64;
                        let c = match held {
                            Some((i, c)) if i == idx => c,
                            _ => {
                                let c = command(t0, &unpack(&y))?.0;
                                held = Some((idx, c));
                                c
                            }
                        };
                        let t1 = ((idx + 1) as f64 * cp).min(t_next);
                        let mut rhs = |t: f64, y: &State| -> Result<State> {
                            let s = unpack(y);
                            s.validate().map_err(|e| Error::Simulation { t, reason: e.to_string() })?;
                            plant_derivative(&s, &c, params, thermal.as_ref()).map(State::from)
                        };
                        y = self.solver.integrate(&mut rhs, t0, t1, y)?;
                        t0 = t1;
                    }
                }
            }
        }
        Ok((rows, StopReason::MaxTime))
    }
}

/// Flies the planned mission under the altitude and attitude controllers
/// with true-state feedback.
pub fn run_mission(config: &SimConfig) -> Result<SimLog> {
    config.validate()?;
    if config.scenario != Scenario::Nominal {
        return Err(invalid_arg("scenario", "run_mission needs the nominal scenario"));
    }
    let params = &config.params;
    let traj = plan_mission(&config.waypoints, config.avg_velocity)?;
    let goal = traj.final_position();
    let h = config.target_height.unwrap_or(goal.z);
    let altitude = AltitudeDesign::new(params, config.poles, h)?;
    let mixer = Mixer::new(params);
    let thermal = match config.temperature {
        Temperature::Nominal => None,
        Temperature::Kelvin(t) => Some(ThermalModel::at(params.hover_thrust(), t)?),
    };

    let mut warnings = Vec::new();
    if config.max_time <= traj.total_time() {
        warnings.push(format!(
            "max_time {} s does not exceed the planned mission time {} s",
            config.max_time,
            traj.total_time()
        ));
    }

    let g = params.gravity();
    let gains = config.attitude_gains;
    let command = |t: f64, s: &RigidBodyState| -> Result<(ThrustCommand, Option<Vector3<f64>>)> {
        let r = traj.sample(t)?;
        let u_alt = altitude_control(
            &Vector2::new(s.position.z, s.velocity.z),
            &Vector2::new(r.position.z, r.velocity.z),
            &altitude,
        );
        let (roll, pitch) = desired_attitude(&r.acceleration.xy(), s.attitude.yaw, g);
        let setpoint = AttitudeSetpoint {
            angles: EulerAngles::new(roll, pitch, 0.0),
            rates: Vector3::zeros(),
        };
        let moment = attitude_control(s, &setpoint, &gains);
        Ok((mixer.combine(&u_alt, &mixer.allocate(&moment)), Some(r.position)))
    };
    let (ref_tol, stop_tol) = (config.reference_tolerance, config.stop_tolerance);
    let stop = |_t: f64, s: &RigidBodyState, r: Option<Vector3<f64>>| {
        r.is_some_and(|r| (r - goal).norm() <= ref_tol) && (s.position - goal).norm() < stop_tol
    };

    let mut plant = Plant {
        params,
        thermal,
        solver: Dopri5::new(config.rtol, config.atol),
        output_interval: config.output_interval,
        control_period: config.control_period,
    };
    let (rows, stop_reason) = plant.run(RigidBodyState::at_rest(traj.start_position()), config.max_time, command, stop)?;
    if stop_reason == StopReason::MaxTime {
        warnings.push(format!("vehicle did not settle within {} m of the goal", config.stop_tolerance));
    }
    Ok(SimLog {
        scenario: Scenario::Nominal,
        rows,
        stop_reason,
        warnings,
        evaluations: plant.solver.evaluations,
    })
}

/// Integrates the plant under a constant thrust command for `duration`.
pub fn run_open_loop(
    params: &QuadrotorParams,
    initial: RigidBodyState,
    thrust: ThrustCommand,
    duration: f64,
    output_interval: f64,
    rtol: f64,
    atol: f64,
) -> Result<SimLog> {
    for (name, v) in [("duration", duration), ("output_interval", output_interval)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid_arg(name, format!("must be finite and > 0, got {v}")));
        }
    }
    let mut plant = Plant {
        params,
        thermal: None,
        solver: Dopri5::new(rtol, atol),
        output_interval,
        control_period: None,
    };
    let (rows, stop_reason) = plant.run(initial, duration, |_, _| Ok((thrust, None)), |_, _, _| false)?;
    Ok(SimLog {
        scenario: Scenario::Nominal,
        rows,
        stop_reason,
        warnings: Vec::new(),
        evaluations: plant.solver.evaluations,
    })
}
