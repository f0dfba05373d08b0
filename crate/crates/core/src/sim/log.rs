use nalgebra::{Vector3, Vector4};

use super::Scenario;
use crate::model::EulerAngles;

/// Altitude channel of the estimator loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorTrace {
    pub z_meas: f64,
    pub z_hat: f64,
    pub zdot_hat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRow {
    pub t: f64,
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub attitude: EulerAngles,
    pub body_rates: Vector3<f64>,
    pub thrust: Vector4<f64>,
    pub saturated: [bool; 4],
    pub reference: Option<Vector3<f64>>,
    /// Moment-to-thrust ratio per motor.
    pub gamma: [f64; 4],
    pub estimator: Option<EstimatorTrace>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Reference and vehicle both reached the final waypoint.
    Arrived,
    MaxTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimLog {
    pub scenario: Scenario,
    pub rows: Vec<SimRow>,
    pub stop_reason: StopReason,
    pub warnings: Vec<String>,
    /// Right-hand side evaluations (0 for fixed-step runs).
    pub evaluations: u64,
}

impl SimLog {
    /// Flat column order; identical for every scenario.
    pub const COLUMNS: [&'static str; 31] = [
        "t", "x", "y", "z", "vx", "vy", "vz", "roll", "pitch", "yaw", "p", "q", "r", "f1", "f2", "f3", "f4",
        "x_ref", "y_ref", "z_ref", "gamma1", "gamma2", "gamma3", "gamma4", "z_meas", "z_hat", "zdot_hat",
        "sat1", "sat2", "sat3", "sat4",
    ];

    pub fn final_row(&self) -> Option<&SimRow> {
        self.rows.last()
    }

    pub fn end_time(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.t)
    }
}

impl SimRow {
    /// Values in [`SimLog::COLUMNS`] order; `None` marks an absent channel.
    pub fn fields(&self) -> [Option<f64>; 31] {
        let mut out = [None; 31];
        let mut put = |i: usize, v: f64| out[i] = Some(v);
        put(0, self.t);
        for k in 0..3 {
            put(1 + k, self.position[k]);
            put(4 + k, self.velocity[k]);
            put(10 + k, self.body_rates[k]);
        }
        put(7, self.attitude.roll);
        put(8, self.attitude.pitch);
        put(9, self.attitude.yaw);
        for k in 0..4 {
            put(13 + k, self.thrust[k]);
            put(20 + k, self.gamma[k]);
            put(27 + k, if self.saturated[k] { 1.0 } else { 0.0 });
        }
        if let Some(r) = self.reference {
            for k in 0..3 {
                put(17 + k, r[k]);
            }
        }
        if let Some(e) = self.estimator {
            put(24, e.z_meas);
            put(25, e.z_hat);
            put(26, e.zdot_hat);
        }
        out
    }
}
