//! Dormand–Prince 5(4) with adaptive step size.

use nalgebra::SVector;

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (same as the last stage row, FSAL).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const MAX_STEPS_PER_CALL: usize = 10_000_000;

#[derive(Debug, Clone)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    /// Step size carried between calls.
    h: Option<f64>,
    /// Right-hand side evaluations so far.
    pub evaluations: u64,
    pub accepted: u64,
    pub rejected: u64,
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            h: None,
            evaluations: 0,
            accepted: 0,
            rejected: 0,
        }
    }

    /// Advances `y` from `t0` to exactly `t1`.
    pub fn integrate<const N: usize, F>(&mut self, f: &mut F, t0: f64, t1: f64, y: SVector<f64, N>) -> Result<SVector<f64, N>>
    where
        F: FnMut(f64, &SVector<f64, N>) -> Result<SVector<f64, N>>,
    {
        let span = t1 - t0;
        if span <= 0.0 {
            return Ok(y);
        }
        let mut t = t0;
        let mut y = y;
        let mut k1 = f(t, &y)?;
        self.evaluations += 1;
        let mut h = self.h.unwrap_or_else(|| self.initial_step(&y, &k1, span)).min(span);
        let h_min = 1e-14 * t1.abs().max(1.0);

        for _ in 0..MAX_STEPS_PER_CALL {
            if t >= t1 {
                return Ok(y);
            }
            let last = t + h >= t1;
            let h_try = if last { t1 - t } else { h };

            let mut k = [SVector::<f64, N>::zeros(); 7];
            k[0] = k1;
            for s in 1..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    if A[s][j] != 0.0 {
                        ys += kj * (h_try * A[s][j]);
                    }
                }
                k[s] = f(t + C[s] * h_try, &ys)?;
                self.evaluations += 1;
            }
            let mut y5 = y;
            let mut err = SVector::<f64, N>::zeros();
            for s in 0..7 {
                y5 += k[s] * (h_try * B5[s]);
                err += k[s] * (h_try * (B5[s] - B4[s]));
            }
            let norm = (0..N)
                .map(|i| {
                    let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
                    (err[i] / sc).powi(2)
                })
                .sum::<f64>()
                / N as f64;
            let norm = norm.sqrt();
            if !norm.is_finite() || y5.iter().any(|v| !v.is_finite()) {
                self.rejected += 1;
                h = h_try * MIN_FACTOR;
                if h < h_min {
                    return Err(Error::Simulation {
                        t,
                        reason: "non-finite state".into(),
                    });
                }
                continue;
            }
            let factor = if norm == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * norm.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if norm <= 1.0 {
                self.accepted += 1;
                t = if last { t1 } else { t + h_try };
                y = y5;
                k1 = k[6];
                // Keep the unclipped step for the next call.
                if !last || h_try >= h {
                    h = h_try * factor;
                }
                self.h = Some(h);
            } else {
                self.rejected += 1;
                h = h_try * factor.min(1.0);
                if h < h_min {
                    return Err(Error::Simulation {
                        t,
                        reason: format!("step size underflow (h = {h:e})"),
                    });
                }
            }
        }
        Err(Error::Simulation {
            t,
            reason: "step budget exhausted".into(),
        })
    }

    fn initial_step<const N: usize>(&self, y: &SVector<f64, N>, dy: &SVector<f64, N>, span: f64) -> f64 {
        let scale = |i: usize| self.atol + self.rtol * y[i].abs();
        let d0 = ((0..N).map(|i| (y[i] / scale(i)).powi(2)).sum::<f64>() / N as f64).sqrt();
        let d1 = ((0..N).map(|i| (dy[i] / scale(i)).powi(2)).sum::<f64>() / N as f64).sqrt();
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.min(span)
    }
}
