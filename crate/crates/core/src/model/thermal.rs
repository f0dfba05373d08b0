//! Air-density thrust loss with temperature.
//!
//! At constant pressure, density falls as 1/T, and rotor thrust tracks
//! density, so delivered thrust is `k_ft / T`. The constant is anchored by
//! requiring the nominal hover thrust at the nominal temperature.

use crate::error::{invalid_param, Result};

/// 25 °C.
pub const NOMINAL_TEMPERATURE_K: f64 = 298.15;

pub fn celsius_to_kelvin(celsius: f64) -> f64 {
    celsius + 273.15
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalModel {
    t_nominal: f64,
    k_ft: f64,
    t_current: f64,
}

impl ThermalModel {
    /// Builds the model from the thrust that holds hover at `t_nominal`.
    pub fn new(hover_thrust_nominal: f64, t_nominal: f64, t_current: f64) -> Result<Self> {
        check_temperature("t_nominal", t_nominal)?;
        check_temperature("t_current", t_current)?;
        if !(hover_thrust_nominal.is_finite() && hover_thrust_nominal > 0.0) {
            return Err(invalid_param(
                "hover_thrust_nominal",
                format!("must be finite and > 0, got {hover_thrust_nominal}"),
            ));
        }
        Ok(Self {
            t_nominal,
            k_ft: hover_thrust_nominal * t_nominal,
            t_current,
        })
    }

    /// Nominal 25 °C reference with the air at `t_current` kelvin.
    pub fn at(hover_thrust_nominal: f64, t_current: f64) -> Result<Self> {
        Self::new(hover_thrust_nominal, NOMINAL_TEMPERATURE_K, t_current)
    }

    pub fn with_temperature(&self, t_current: f64) -> Result<Self> {
        check_temperature("t_current", t_current)?;
        Ok(Self { t_current, ..*self })
    }

    pub fn t_nominal(&self) -> f64 {
        self.t_nominal
    }

    /// Thrust-temperature constant, N·K.
    pub fn k_ft(&self) -> f64 {
        self.k_ft
    }

    pub fn t_current(&self) -> f64 {
        self.t_current
    }

    /// Hover-level thrust actually delivered at `t_current`.
    pub fn delivered_hover_thrust(&self) -> f64 {
        self.k_ft / self.t_current
    }

    pub fn scale(&self) -> f64 {
        self.t_nominal / self.t_current
    }
}

/// Ratio of delivered to commanded thrust at the model's temperature.
pub fn thermal_thrust_scale(model: &ThermalModel) -> f64 {
    model.scale()
}

fn check_temperature(name: &'static str, t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(invalid_param(name, format!("temperature must be finite and > 0 K, got {t}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HOVER: f64 = 1.7658;

    #[test]
    fn nominal_is_identity() {
        let m = ThermalModel::at(HOVER, NOMINAL_TEMPERATURE_K).unwrap();
        assert_eq!(thermal_thrust_scale(&m), 1.0);
    }

    #[test]
    fn crater_temperatures() {
        let m = ThermalModel::at(HOVER, celsius_to_kelvin(185.0)).unwrap();
        assert!((m.k_ft() - 526.4733).abs() < 1e-3);
        assert!((HOVER * thermal_thrust_scale(&m) - 1.1491).abs() < 1e-3);
        let m = m.with_temperature(celsius_to_kelvin(885.0)).unwrap();
        assert!((m.delivered_hover_thrust() - 0.4546).abs() < 1e-3);
    }

    #[test]
    fn rejects_non_physical_temperature() {
        assert!(ThermalModel::at(HOVER, 0.0).is_err());
        assert!(ThermalModel::at(HOVER, -5.0).is_err());
        assert!(ThermalModel::at(HOVER, f64::NAN).is_err());
        assert!(ThermalModel::at(0.0, 300.0).is_err());
    }

    proptest! {
        #[test]
        fn scale_strictly_decreasing(t1 in 1.0f64..5000.0, dt in 1e-6f64..1000.0) {
            let a = ThermalModel::at(HOVER, t1).unwrap();
            let b = ThermalModel::at(HOVER, t1 + dt).unwrap();
            prop_assert!(thermal_thrust_scale(&b) < thermal_thrust_scale(&a));
        }
    }
}
