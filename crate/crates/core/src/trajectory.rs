//! Piecewise 7th-order polynomial references through a waypoint list.
//!
//! Each leg takes `length / avg_velocity` seconds. All legs of one axis are
//! solved together: endpoint positions, C⁶ continuity at interior
//! junctions, and rest (zero velocity, acceleration and jerk) at both ends
//! of the mission. That is exactly 8 equations per leg.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::{invalid_arg, Error, Result};

pub const ORDER: usize = 7;
pub const N_COEFFS: usize = ORDER + 1;
/// Highest derivative kept continuous across interior junctions.
pub const CONTINUITY: usize = 6;
/// Number of derivatives pinned to zero at the start and end of the mission.
const REST_DERIVATIVES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint(pub Vector3<f64>);

impl Waypoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vector3::new(x, y, z))
    }
}

impl From<[f64; 3]> for Waypoint {
    fn from(p: [f64; 3]) -> Self {
        Self::new(p[0], p[1], p[2])
    }
}

/// One leg of the reference; coefficients are in SI units against local
/// time `t - start_time`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSegment {
    pub coeffs: [[f64; N_COEFFS]; 3],
    pub duration: f64,
    pub start_time: f64,
}

impl PolynomialSegment {
    /// `k`-th time derivative at local time `t` (not clamped).
    pub fn derivative(&self, t: f64, k: usize) -> Vector3<f64> {
        Vector3::from_fn(|axis, _| poly_derivative(&self.coeffs[axis], t, k))
    }

    pub fn end_time(&self) -> f64 {
        self.start_time + self.duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSample {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub acceleration: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    segments: Vec<PolynomialSegment>,
    total_time: f64,
    avg_velocity: f64,
    final_position: Vector3<f64>,
}

impl Trajectory {
    pub fn segments(&self) -> &[PolynomialSegment] {
        &self.segments
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn avg_velocity(&self) -> f64 {
        self.avg_velocity
    }

    pub fn start_position(&self) -> Vector3<f64> {
        self.segments[0].derivative(0.0, 0)
    }

    pub fn final_position(&self) -> Vector3<f64> {
        self.final_position
    }

    /// `k`-th derivative of the reference at mission time `t`; past the
    /// end the reference holds the final waypoint.
    pub fn derivative(&self, t: f64, k: usize) -> Result<Vector3<f64>> {
        if t.is_nan() || t < 0.0 {
            return Err(invalid_arg("t", format!("sample time must be >= 0, got {t}")));
        }
        if t >= self.total_time {
            return Ok(if k == 0 {
                self.final_position
            } else {
                Vector3::zeros()
            });
        }
        let seg = self.segment_at(t);
        let local = (t - seg.start_time).clamp(0.0, seg.duration);
        Ok(seg.derivative(local, k))
    }

    pub fn sample(&self, t: f64) -> Result<ReferenceSample> {
        Ok(ReferenceSample {
            position: self.derivative(t, 0)?,
            velocity: self.derivative(t, 1)?,
            acceleration: self.derivative(t, 2)?,
        })
    }

    fn segment_at(&self, t: f64) -> &PolynomialSegment {
        let idx = self
            .segments
            .partition_point(|s| s.start_time <= t)
            .saturating_sub(1);
        &self.segments[idx]
    }
}

/// Plans the reference through `waypoints` at average speed `avg_velocity`.
pub fn plan_mission(waypoints: &[Waypoint], avg_velocity: f64) -> Result<Trajectory> {
    if waypoints.len() < 2 {
        return Err(Error::InvalidWaypoints(format!(
            "need at least 2 waypoints, got {}",
            waypoints.len()
        )));
    }
    if !(avg_velocity.is_finite() && avg_velocity > 0.0) {
        return Err(invalid_arg(
            "avg_velocity",
            format!("must be finite and > 0, got {avg_velocity}"),
        ));
    }
    if let Some(i) = waypoints.iter().position(|w| w.0.iter().any(|v| !v.is_finite())) {
        return Err(Error::InvalidWaypoints(format!("waypoint {i} is not finite")));
    }

    let durations = waypoints
        .windows(2)
        .enumerate()
        .map(|(i, pair)| {
            let len = (pair[1].0 - pair[0].0).norm();
            if len <= 0.0 {
                Err(Error::InvalidWaypoints(format!(
                    "waypoints {i} and {} coincide (zero-length leg)",
                    i + 1
                )))
            } else {
                Ok(len / avg_velocity)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let system = constraint_matrix(&durations);
    let lu = system.lu();
    let mut per_axis = Vec::with_capacity(3);
    for axis in 0..3 {
        let rhs = constraint_rhs(waypoints, axis);
        let sol = lu
            .solve(&rhs)
            .ok_or_else(|| Error::Planning("singular constraint system".into()))?;
        if sol.iter().any(|v| !v.is_finite()) {
            return Err(Error::Planning("non-finite polynomial coefficients".into()));
        }
        per_axis.push(sol);
    }

    let mut segments = Vec::with_capacity(durations.len());
    let mut start_time = 0.0;
    for (i, &duration) in durations.iter().enumerate() {
        let mut coeffs = [[0.0; N_COEFFS]; 3];
        for (axis, sol) in per_axis.iter().enumerate() {
            // Undo the [0, 1] time normalisation.
            let mut scale = 1.0;
            for j in 0..N_COEFFS {
                coeffs[axis][j] = sol[N_COEFFS * i + j] / scale;
                scale *= duration;
            }
        }
        segments.push(PolynomialSegment {
            coeffs,
            duration,
            start_time,
        });
        start_time += duration;
    }

    Ok(Trajectory {
        segments,
        total_time: durations.iter().sum(),
        avg_velocity,
        final_position: waypoints[waypoints.len() - 1].0,
    })
}

/// Row of `d^k/dτ^k` of the monomials τ^0..τ^7.
fn monomial_derivative_row(tau: f64, k: usize) -> [f64; N_COEFFS] {
    let mut row = [0.0; N_COEFFS];
    for (j, slot) in row.iter_mut().enumerate().skip(k) {
        let falling: f64 = ((j - k + 1)..=j).map(|v| v as f64).product();
        *slot = falling * tau.powi((j - k) as i32);
    }
    row
}

fn constraint_matrix(durations: &[f64]) -> DMatrix<f64> {
    let m = durations.len();
    let n = N_COEFFS * m;
    let mut a = DMatrix::zeros(n, n);
    let mut row = 0;
    let put = |a: &mut DMatrix<f64>, row: usize, seg: usize, vals: [f64; N_COEFFS], factor: f64| {
        for (j, v) in vals.iter().enumerate() {
            a[(row, N_COEFFS * seg + j)] += factor * v;
        }
    };

    for seg in 0..m {
        put(&mut a, row, seg, monomial_derivative_row(0.0, 0), 1.0);
        put(&mut a, row + 1, seg, monomial_derivative_row(1.0, 0), 1.0);
        row += 2;
    }
    // In normalised time the k-th physical derivative is (d/dτ)^k / T^k, so
    // continuity reads p_i^(k)(1) - (T_i / T_{i+1})^k p_{i+1}^(k)(0) = 0.
    for seg in 0..m.saturating_sub(1) {
        let ratio = durations[seg] / durations[seg + 1];
        for k in 1..=CONTINUITY {
            put(&mut a, row, seg, monomial_derivative_row(1.0, k), 1.0);
            put(&mut a, row, seg + 1, monomial_derivative_row(0.0, k), -ratio.powi(k as i32));
            row += 1;
        }
    }
    for k in 1..=REST_DERIVATIVES {
        put(&mut a, row, 0, monomial_derivative_row(0.0, k), 1.0);
        put(&mut a, row + 1, m - 1, monomial_derivative_row(1.0, k), 1.0);
        row += 2;
    }
    debug_assert_eq!(row, n);
    a
}

fn constraint_rhs(waypoints: &[Waypoint], axis: usize) -> DVector<f64> {
    let m = waypoints.len() - 1;
    let mut b = DVector::zeros(N_COEFFS * m);
    for seg in 0..m {
        b[2 * seg] = waypoints[seg].0[axis];
        b[2 * seg + 1] = waypoints[seg + 1].0[axis];
    }
    b
}

fn poly_derivative(coeffs: &[f64; N_COEFFS], t: f64, k: usize) -> f64 {
    if k > ORDER {
        return 0.0;
    }
    // Horner over the differentiated coefficients.
    let mut acc = 0.0;
    for j in (k..N_COEFFS).rev() {
        let falling: f64 = ((j - k + 1)..=j).map(|v| v as f64).product();
        acc = acc * t + falling * coeffs[j];
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn survey_waypoints() -> Vec<Waypoint> {
        [[0., 0., 0.], [0., 0., 1.], [0., 0., 2.], [1., 0., 2.], [2., 0., 2.]]
            .into_iter()
            .map(Waypoint::from)
            .collect()
    }

    #[test]
    fn survey_mission_timing() {
        let traj = plan_mission(&survey_waypoints(), 0.5).unwrap();
        assert_eq!(traj.segments().len(), 4);
        assert!((traj.total_time() - 8.0).abs() < 1e-9);
        let z = traj.sample(2.0).unwrap().position.z;
        assert!((z - 1.0).abs() < 1e-6);
    }

    #[test]
    fn single_leg_boundary_conditions() {
        let wps = [Waypoint::new(0.0, 0.0, 0.0), Waypoint::new(1.0, 0.0, 0.0)];
        let traj = plan_mission(&wps, 0.5).unwrap();
        assert!((traj.total_time() - 2.0).abs() < 1e-12);
        let start = traj.sample(0.0).unwrap();
        let end = traj.sample(2.0).unwrap();
        assert!(start.position.norm() < 1e-12);
        assert!(start.velocity.norm() < 1e-12);
        assert!((end.position - Vector3::new(1.0, 0.0, 0.0)).norm() < 1e-12);
        assert!(end.velocity.norm() < 1e-12);
        // Just inside the leg the polynomial itself must also come to rest.
        let seg = &traj.segments()[0];
        assert!(seg.derivative(seg.duration, 1).norm() < 1e-9);
        assert!(seg.derivative(seg.duration, 2).norm() < 1e-9);
        assert!(seg.derivative(seg.duration, 3).norm() < 1e-9);
    }

    #[test]
    fn single_leg_midpoint_matches_min_norm_oracle() {
        // Independent route: assemble the 8 constraints in physical time and
        // take the SVD least-squares solution.
        let (len, dur) = (1.0, 2.0);
        let mut a = DMatrix::<f64>::zeros(8, 8);
        let mut b = DVector::<f64>::zeros(8);
        let deriv = |t: f64, k: usize, j: usize| -> f64 {
            if j < k {
                0.0
            } else {
                let f: f64 = ((j - k + 1)..=j).map(|v| v as f64).product();
                f * t.powi((j - k) as i32)
            }
        };
        let mut row = 0;
        for (t, k, val) in [(0.0, 0, 0.0), (dur, 0, len)]
            .into_iter()
            .chain((1..=3).flat_map(|k| [(0.0, k, 0.0), (dur, k, 0.0)]))
        {
            for j in 0..8 {
                a[(row, j)] = deriv(t, k, j);
            }
            b[row] = val;
            row += 1;
        }
        let coeffs = a.svd(true, true).solve(&b, 1e-14).unwrap();
        let mid: f64 = (0..8).map(|j| coeffs[j] * (dur / 2.0).powi(j as i32)).sum();
        assert!((mid - 0.5).abs() < 1e-9);

        let traj = plan_mission(&[Waypoint::new(0.0, 0.0, 0.0), Waypoint::new(len, 0.0, 0.0)], 0.5).unwrap();
        let planned = traj.sample(dur / 2.0).unwrap().position.x;
        assert!((planned - mid).abs() < 1e-9);
        for j in 0..8 {
            assert!((traj.segments()[0].coeffs[0][j] - coeffs[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn sampling_edges() {
        let traj = plan_mission(&survey_waypoints(), 0.5).unwrap();
        assert!(traj.sample(-1e-9).is_err());
        let end = traj.sample(8.0).unwrap();
        assert!((end.position - Vector3::new(2.0, 0.0, 2.0)).norm() < 1e-9);
        assert_eq!(end.velocity, Vector3::zeros());
        assert_eq!(end.acceleration, Vector3::zeros());
        assert_eq!(traj.sample(100.0).unwrap(), end);
    }

    #[test]
    fn invalid_inputs() {
        let p = Waypoint::new(0.0, 0.0, 0.0);
        assert!(matches!(plan_mission(&[p], 0.5), Err(Error::InvalidWaypoints(_))));
        assert!(matches!(plan_mission(&[p, p], 0.5), Err(Error::InvalidWaypoints(_))));
        assert!(plan_mission(&[p, Waypoint::new(1.0, 0.0, 0.0)], 0.0).is_err());
        assert!(plan_mission(&[p, Waypoint::new(f64::NAN, 0.0, 0.0)], 1.0).is_err());
    }

    #[test]
    fn junction_continuity() {
        let traj = plan_mission(&survey_waypoints(), 0.5).unwrap();
        for pair in traj.segments().windows(2) {
            for k in 0..=CONTINUITY {
                let left = pair[0].derivative(pair[0].duration, k);
                let right = pair[1].derivative(0.0, k);
                let scale = 1.0_f64.max(left.amax()).max(right.amax());
                assert!((left - right).amax() <= 1e-6 * scale, "k={k}: {left} vs {right}");
            }
        }
    }

    proptest! {
        #[test]
        fn doubling_speed_preserves_path(frac in 0.0f64..1.0, v in 0.2f64..2.0) {
            let wps = survey_waypoints();
            let slow = plan_mission(&wps, v).unwrap();
            let fast = plan_mission(&wps, 2.0 * v).unwrap();
            for (a, b) in slow.segments().iter().zip(fast.segments()) {
                prop_assert!((a.duration - 2.0 * b.duration).abs() < 1e-12);
            }
            let t = frac * slow.total_time();
            let a = slow.sample(t).unwrap().position;
            let b = fast.sample(t / 2.0).unwrap().position;
            prop_assert!((a - b).amax() < 1e-9);
        }

        #[test]
        fn clamp_after_end(extra in 0.0f64..50.0) {
            let traj = plan_mission(&survey_waypoints(), 0.5).unwrap();
            prop_assert_eq!(traj.sample(traj.total_time() + extra).unwrap(), traj.sample(traj.total_time()).unwrap());
        }
    }
}
