//! Tracking lag of a first-order tracker chasing a moving reference.
//!
//! The reference is replaced by `n` equal-time steps. Over each step the
//! tracker closes a fraction `p = 1 - exp(λ·Δt)` of its remaining gap, so
//! the gap left when the reference arrives is
//! `Δt · Σ vᵢ (1 - p)^(n - i + 1)`. For a uniformly accelerating reference
//! the `n → ∞` limit has a closed form.

use crate::error::{invalid_arg, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum VelocityProfile {
    /// Starts at rest and reaches `v_final` at `t_total` with constant acceleration.
    UniformAcceleration { v_final: f64, t_total: f64 },
    /// Piecewise-linear velocity through `(t, v)` samples; the first sample
    /// must be at `t = 0` and the last one sets the total time.
    Sampled(Vec<(f64, f64)>),
}

impl VelocityProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::UniformAcceleration { v_final, t_total } => {
                if !(t_total.is_finite() && *t_total > 0.0) {
                    return Err(invalid_arg("t_total", format!("must be > 0, got {t_total}")));
                }
                if !(v_final.is_finite() && *v_final >= 0.0) {
                    return Err(invalid_arg("v_final", format!("must be finite and >= 0, got {v_final}")));
                }
            }
            Self::Sampled(samples) => {
                if samples.len() < 2 {
                    return Err(invalid_arg("profile", "need at least two samples"));
                }
                if samples[0].0 != 0.0 {
                    return Err(invalid_arg("profile", "first sample must be at t = 0"));
                }
                if samples.windows(2).any(|w| w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater)) {
                    return Err(invalid_arg("profile", "sample times must be strictly increasing"));
                }
                if samples.iter().any(|&(t, v)| !t.is_finite() || !v.is_finite() || v < 0.0) {
                    return Err(invalid_arg("profile", "samples must be finite with v >= 0"));
                }
            }
        }
        Ok(())
    }

    pub fn t_total(&self) -> f64 {
        match self {
            Self::UniformAcceleration { t_total, .. } => *t_total,
            Self::Sampled(s) => s.last().map_or(0.0, |s| s.0),
        }
    }

    pub fn velocity_at(&self, t: f64) -> f64 {
        match self {
            Self::UniformAcceleration { v_final, t_total } => v_final * (t / t_total),
            Self::Sampled(s) => {
                let i = s.partition_point(|&(ti, _)| ti <= t);
                if i == 0 {
                    s[0].1
                } else if i == s.len() {
                    s[s.len() - 1].1
                } else {
                    let (t0, v0) = s[i - 1];
                    let (t1, v1) = s[i];
                    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discretization {
    Steps(usize),
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagResult {
    /// Reference position minus tracker position when the reference arrives, metres.
    pub lag: f64,
    /// `1 - lag`, the unit-normalised fraction of the move completed.
    pub accomplishment: f64,
    pub n_used: Discretization,
}

impl LagResult {
    fn new(lag: f64, n_used: Discretization) -> Self {
        Self {
            lag,
            accomplishment: 1.0 - lag,
            n_used,
        }
    }
}

fn check_eigenvalue(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda < 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidEigenvalue(lambda))
    }
}

/// Lag from the `n`-step reference series.
pub fn discretized_lag(lambda: f64, profile: &VelocityProfile, n: usize) -> Result<LagResult> {
    check_eigenvalue(lambda)?;
    profile.validate()?;
    if n == 0 {
        return Err(invalid_arg("n", "must be >= 1"));
    }
    let t_total = profile.t_total();
    let dt = t_total / n as f64;
    // (1 - p)^k = exp(λ·Δt·k), evaluated directly so the tail never underflows
    // through repeated multiplication.
    let log_keep = lambda * dt;
    let sum: f64 = (1..=n)
        .map(|i| {
            let v = profile.velocity_at(i as f64 * dt);
            v * (log_keep * (n - i + 1) as f64).exp()
        })
        .sum();
    Ok(LagResult::new(dt * sum, Discretization::Steps(n)))
}

/// Limit of the step series for a uniformly accelerating reference.
///
/// With `k = -λ` and `a = v_final / t_total` the limit is
/// `(a/k)·t_total - (a/k²)(1 - e^(-k·t_total))`.
pub fn closed_form_lag(lambda: f64, v_final: f64, t_total: f64) -> Result<LagResult> {
    check_eigenvalue(lambda)?;
    if !(v_final.is_finite() && v_final > 0.0) {
        return Err(invalid_arg("v_final", format!("must be > 0, got {v_final}")));
    }
    if !(t_total.is_finite() && t_total > 0.0) {
        return Err(invalid_arg("t_total", format!("must be > 0, got {t_total}")));
    }
    let k = -lambda;
    let a = v_final / t_total;
    // -expm1 keeps 1 - e^(-kT) accurate when kT is tiny.
    let lag = a / k * t_total - a / (k * k) * (-(-k * t_total).exp_m1());
    Ok(LagResult::new(lag, Discretization::ClosedForm))
}

/// Unit-normalised accomplishment, `1 - lag`.
pub fn accomplishment(result: &LagResult) -> f64 {
    1.0 - result.lag
}
