//! Quadrotor flight-control design and simulation.
//!
//! Rigid-body model, minimum-snap style trajectory planning, pole-placement
//! altitude control, PD attitude control, a correlated-noise Kalman
//! estimator and a closed-loop simulator.

pub mod control;
pub mod error;
pub mod estimation;
pub mod lag;
pub mod model;
pub mod sim;
pub mod trajectory;

pub use error::{Error, Result};
