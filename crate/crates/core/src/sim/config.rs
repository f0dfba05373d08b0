use crate::control::AttitudeGains;
use crate::error::{invalid_arg, Result};
use crate::estimation::{build_noise_model, NoiseModel};
use crate::model::QuadrotorParams;
use crate::trajectory::Waypoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Full 3-D mission with true-state feedback.
    Nominal,
    /// Altitude-only hover near a heat source, estimator in the loop.
    VolcanoHover,
}

/// How the plant's thermal acceleration disturbance evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThermalMode {
    /// Fresh draw every estimator step.
    White,
    /// One draw, held for the whole run.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    Nominal,
    Kelvin(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: QuadrotorParams,
    pub waypoints: Vec<Waypoint>,
    /// Mean speed used to time the trajectory, m/s.
    pub avg_velocity: f64,
    pub poles: [f64; 2],
    pub attitude_gains: AttitudeGains,
    /// Altitude design height `h` of the chasing gain. Defaults to the last
    /// waypoint altitude (mission) or `hover_height` (hover).
    pub target_height: Option<f64>,
    pub output_interval: f64,
    /// Position error to the final waypoint that ends the mission, m.
    pub stop_tolerance: f64,
    /// Distance of the reference from its final value counted as arrived, m.
    pub reference_tolerance: f64,
    pub max_time: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Zero-order-hold period for the controller. `None` evaluates the
    /// control law continuously inside the integrator.
    pub control_period: Option<f64>,
    pub scenario: Scenario,
    /// Noise model used for the estimator design.
    pub noise: Option<NoiseModel>,
    /// Noise injected into the plant and sensors; defaults to `noise`.
    pub plant_noise: Option<NoiseModel>,
    pub thermal_mode: ThermalMode,
    pub seed: u64,
    /// Air temperature seen by the rotors in the 3-D mission.
    pub temperature: Temperature,
    pub hover_height: f64,
    /// Fixed step of the hover scenario, s.
    pub estimator_dt: f64,
}

impl SimConfig {
    /// Climb to 2 m, then traverse 2 m along x.
    pub fn climb_and_traverse() -> Self {
        Self {
            params: QuadrotorParams::default(),
            waypoints: [[0., 0., 0.], [0., 0., 1.], [0., 0., 2.], [1., 0., 2.], [2., 0., 2.]]
                .into_iter()
                .map(Waypoint::from)
                .collect(),
            avg_velocity: 0.5,
            poles: [-100.0, -10.0],
            attitude_gains: AttitudeGains::default(),
            target_height: None,
            output_interval: 0.05,
            stop_tolerance: 0.05,
            reference_tolerance: 0.005,
            max_time: 20.0,
            rtol: 1e-8,
            atol: 1e-10,
            control_period: None,
            scenario: Scenario::Nominal,
            noise: None,
            plant_noise: None,
            thermal_mode: ThermalMode::White,
            seed: 0,
            temperature: Temperature::Nominal,
            hover_height: 1.0,
            estimator_dt: 1e-3,
        }
    }

    /// Climb to 1 m and hold it over a 185–885 °C crater with a noisy
    /// laser altimeter (±0.06 m) and accelerometer (±0.3 m/s²).
    pub fn volcano_hover() -> Self {
        let params = QuadrotorParams::default();
        let noise = build_noise_model(185.0, 885.0, params.hover_thrust(), params.mass(), 0.06, 0.3)
            .expect("built-in noise ranges are valid");
        Self {
            waypoints: Vec::new(),
            max_time: 30.0,
            scenario: Scenario::VolcanoHover,
            noise: Some(noise),
            params,
            ..Self::climb_and_traverse()
        }
    }

    /// Noise seen by the plant and sensors.
    pub fn effective_plant_noise(&self) -> Option<NoiseModel> {
        self.plant_noise.or(self.noise)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid_arg(name, format!("must be finite and > 0, got {v}")))
            }
        };
        positive("output_interval", self.output_interval)?;
        positive("stop_tolerance", self.stop_tolerance)?;
        positive("reference_tolerance", self.reference_tolerance)?;
        positive("max_time", self.max_time)?;
        positive("rtol", self.rtol)?;
        positive("atol", self.atol)?;
        positive("estimator_dt", self.estimator_dt)?;
        if let Some(p) = self.control_period {
            positive("control_period", p)?;
        }
        if let Some(h) = self.target_height {
            if !h.is_finite() || h == 0.0 {
                return Err(invalid_arg("target_height", format!("must be finite and non-zero, got {h}")));
            }
        }
        if let Temperature::Kelvin(t) = self.temperature {
            positive("temperature", t)?;
        }
        for n in [self.noise, self.plant_noise].into_iter().flatten() {
            n.validate()?;
        }
        match self.scenario {
            Scenario::Nominal => {
                if self.waypoints.is_empty() {
                    return Err(invalid_arg("waypoints", "at least two waypoints are required"));
                }
            }
            Scenario::VolcanoHover => {
                positive("hover_height", self.hover_height)?;
                if self.noise.is_none() {
                    return Err(invalid_arg("noise", "the hover scenario needs a noise model"));
                }
            }
        }
        Ok(())
    }
}
