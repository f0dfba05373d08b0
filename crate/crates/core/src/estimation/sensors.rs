use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::NoiseModel;

/// Seeded random stream; one per simulation run.
#[derive(Debug, Clone)]
pub struct SensorRng(ChaCha8Rng);

impl SensorRng {
    pub fn seed_from_u64(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.0)
    }
}

/// Laser height and accelerometer reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub z: f64,
    pub zdd: f64,
}

/// Corrupts the true altitude and acceleration with sensor noise. Both
/// draws are always taken so the stream position does not depend on the
/// noise magnitudes.
pub fn simulate_sensors(z: f64, zdd: f64, noise: &NoiseModel, rng: &mut SensorRng) -> Measurement {
    let n_laser = rng.standard_normal();
    let n_imu = rng.standard_normal();
    Measurement {
        z: z + noise.sigma_laser * n_laser,
        zdd: zdd + noise.sigma_imu * n_imu,
    }
}

/// One draw of the thermal acceleration disturbance.
pub fn sample_thermal_disturbance(noise: &NoiseModel, rng: &mut SensorRng) -> f64 {
    noise.thermal_mean + noise.sigma_thermal * rng.standard_normal()
}
