//! Fixed-step simulation machinery: time grids, input signals, scheduled
//! resets and classical RK4 integration.

mod grid;
mod integrate;
mod signal;

pub use grid::TimeGrid;
pub use integrate::{
    halving_error, integrate, integrate_final, integrate_observed, integrate_sampled, Column, Reset, ResetSchedule, Rk4, System,
    Trajectory, VectorField,
};
pub use signal::{hold_index, noise_sample, Piece, Signal, SignalSpec};

use thiserror::Error;

/// Default integration step in dimensionless time.
pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("signal is not defined at t = {t}")]
    SignalDomain { t: f64 },
    #[error("invalid reset schedule: {0}")]
    InvalidResets(String),
    #[error("initial state has {got} components, system has {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("non-finite derivative at step {step} in component {component}")]
    NonFinite { step: usize, component: String },
    #[error("trajectory shape: {0}")]
    Shape(String),
}
