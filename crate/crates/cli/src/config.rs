//! JSON run configuration.
//!
//! Every section and field is optional; absent values take the built-in
//! climb-and-traverse (or volcano-hover) defaults. Unknown keys are rejected.

use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use vq_core::control::AttitudeGains;
use vq_core::estimation::{build_noise_model, NoiseModel};
use vq_core::model::QuadrotorParams;
use vq_core::sim::{Scenario, SimConfig, Temperature, ThermalMode};
use vq_core::trajectory::Waypoint;

use crate::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub quadrotor: QuadrotorSection,
    pub mission: MissionSection,
    pub controller: ControllerSection,
    pub estimator: EstimatorSection,
    pub simulation: SimulationSection,
    pub noise: NoiseSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadrotorSection {
    pub mass: f64,
    pub arm_length: f64,
    /// Row-major inertia tensor, kg·m².
    pub inertia: [[f64; 3]; 3],
    pub gravity: f64,
    pub k_f: f64,
    pub k_m: f64,
}

impl Default for QuadrotorSection {
    fn default() -> Self {
        let i = QuadrotorParams::reference_inertia();
        Self {
            mass: QuadrotorParams::REFERENCE_MASS,
            arm_length: QuadrotorParams::REFERENCE_ARM_LENGTH,
            inertia: [0, 1, 2].map(|r| [0, 1, 2].map(|c| i[(r, c)])),
            gravity: QuadrotorParams::REFERENCE_GRAVITY,
            k_f: QuadrotorParams::REFERENCE_K_F,
            k_m: QuadrotorParams::REFERENCE_K_M,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    #[default]
    Nominal,
    VolcanoHover,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MissionSection {
    pub scenario: ScenarioName,
    pub waypoints: Option<Vec<[f64; 3]>>,
    pub avg_velocity: f64,
    pub hover_height: f64,
}

impl Default for MissionSection {
    fn default() -> Self {
        let d = SimConfig::climb_and_traverse();
        Self {
            scenario: ScenarioName::Nominal,
            waypoints: None,
            avg_velocity: d.avg_velocity,
            hover_height: d.hover_height,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerSection {
    pub poles: [f64; 2],
    pub kp: [f64; 3],
    pub kd: [f64; 3],
    pub target_height: Option<f64>,
    pub control_period: Option<f64>,
}

impl Default for ControllerSection {
    fn default() -> Self {
        let g = AttitudeGains::default();
        Self {
            poles: SimConfig::climb_and_traverse().poles,
            kp: [g.kp.x, g.kp.y, g.kp.z],
            kd: [g.kd.x, g.kd.y, g.kd.z],
            target_height: None,
            control_period: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThermalModeName {
    #[default]
    White,
    Constant,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorSection {
    pub dt: f64,
    pub thermal_mode: ThermalModeName,
}

impl Default for EstimatorSection {
    fn default() -> Self {
        Self {
            dt: SimConfig::climb_and_traverse().estimator_dt,
            thermal_mode: ThermalModeName::White,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NominalTag {
    Nominal,
}

/// `"nominal"` or an absolute temperature in kelvin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TemperatureSpec {
    Named(NominalTag),
    Kelvin(f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    pub output_interval: f64,
    pub stop_tolerance: f64,
    pub reference_tolerance: f64,
    /// Defaults to 20 s for missions and 30 s for the hover scenario.
    pub max_time: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
    pub seed: u64,
    pub temperature: TemperatureSpec,
}

impl Default for SimulationSection {
    fn default() -> Self {
        let d = SimConfig::climb_and_traverse();
        Self {
            output_interval: d.output_interval,
            stop_tolerance: d.stop_tolerance,
            reference_tolerance: d.reference_tolerance,
            max_time: None,
            rtol: d.rtol,
            atol: d.atol,
            seed: d.seed,
            temperature: TemperatureSpec::Named(NominalTag::Nominal),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlantNoise {
    /// Plant and sensors see the designed noise.
    #[default]
    Design,
    /// Noise-free plant and sensors.
    Silent,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    /// Temperature range of the heat source, °C.
    pub t_low_c: f64,
    pub t_high_c: f64,
    /// ± accuracy of the laser altimeter (3σ), m.
    pub laser_bound: f64,
    /// ± accuracy of the accelerometer (3σ), m/s².
    pub imu_bound: f64,
    /// Leave the thermal mean out of the estimator model.
    pub ignore_thermal_mean: bool,
    pub plant: PlantNoise,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            t_low_c: 185.0,
            t_high_c: 885.0,
            laser_bound: 0.06,
            imu_bound: 0.3,
            ignore_thermal_mean: false,
            plant: PlantNoise::Design,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            let path = e.path().to_string();
            CliError::Config(format!(
                "line {}, column {}: field `{path}`: {inner}",
                inner.line(),
                inner.column()
            ))
        })
    }

    /// Canonical JSON of the fully resolved configuration.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serialises")
    }

    pub fn params(&self) -> Result<QuadrotorParams, CliError> {
        let q = &self.quadrotor;
        let inertia = Matrix3::from_fn(|r, c| q.inertia[r][c]);
        QuadrotorParams::new(q.mass, q.arm_length, inertia, q.gravity, q.k_f, q.k_m)
            .map_err(|e| CliError::Config(format!("quadrotor: {e}")))
    }

    pub fn noise_model(&self, params: &QuadrotorParams) -> Result<NoiseModel, CliError> {
        let n = &self.noise;
        let mut model = build_noise_model(
            n.t_low_c,
            n.t_high_c,
            params.hover_thrust(),
            params.mass(),
            n.laser_bound,
            n.imu_bound,
        )
        .map_err(|e| CliError::Config(format!("noise: {e}")))?;
        if n.ignore_thermal_mean {
            model.thermal_mean = 0.0;
        }
        Ok(model)
    }

    pub fn scenario(&self) -> Scenario {
        match self.mission.scenario {
            ScenarioName::Nominal => Scenario::Nominal,
            ScenarioName::VolcanoHover => Scenario::VolcanoHover,
        }
    }

    /// Builds the simulator configuration; `seed` overrides the file value.
    pub fn to_sim_config(&self, seed: Option<u64>) -> Result<SimConfig, CliError> {
        let params = self.params()?;
        let scenario = self.scenario();
        let mut base = match scenario {
            Scenario::Nominal => SimConfig::climb_and_traverse(),
            Scenario::VolcanoHover => SimConfig::volcano_hover(),
        };
        let waypoints = match (&self.mission.waypoints, scenario) {
            (Some(w), _) if w.is_empty() && scenario == Scenario::Nominal => {
                return Err(CliError::Config(
                    "field `mission.waypoints`: must list at least two waypoints, got none".into(),
                ))
            }
            (Some(w), _) => w.iter().copied().map(Waypoint::from).collect(),
            (None, Scenario::Nominal) => {
                return Err(CliError::Config("missing field `mission.waypoints`".into()));
            }
            (None, Scenario::VolcanoHover) => Vec::new(),
        };
        let c = &self.controller;
        let gains = AttitudeGains::new(Vector3::from(c.kp), Vector3::from(c.kd))
            .map_err(|e| CliError::Config(format!("controller: {e}")))?;
        let noise = self.noise_model(&params)?;
        let s = &self.simulation;
        base.params = params;
        base.waypoints = waypoints;
        base.avg_velocity = self.mission.avg_velocity;
        base.hover_height = self.mission.hover_height;
        base.poles = c.poles;
        base.attitude_gains = gains;
        base.target_height = c.target_height;
        base.control_period = c.control_period;
        base.output_interval = s.output_interval;
        base.stop_tolerance = s.stop_tolerance;
        base.reference_tolerance = s.reference_tolerance;
        if let Some(t) = s.max_time {
            base.max_time = t;
        }
        base.rtol = s.rtol;
        base.atol = s.atol;
        base.seed = seed.unwrap_or(s.seed);
        base.temperature = match s.temperature {
            TemperatureSpec::Named(NominalTag::Nominal) => Temperature::Nominal,
            TemperatureSpec::Kelvin(k) => Temperature::Kelvin(k),
        };
        base.estimator_dt = self.estimator.dt;
        base.thermal_mode = match self.estimator.thermal_mode {
            ThermalModeName::White => ThermalMode::White,
            ThermalModeName::Constant => ThermalMode::Constant,
        };
        base.noise = Some(noise);
        base.plant_noise = match self.noise.plant {
            PlantNoise::Design => None,
            PlantNoise::Silent => Some(NoiseModel::silent()),
        };
        base.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(base)
    }
}
