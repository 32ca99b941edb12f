//! Control laws and internal models.

mod coupling;
mod disturbance;
mod phase;
mod tracking;

pub use coupling::{diffusive_coupling, synaptic_coupling_current, velocity_coupling};
pub use disturbance::{disturbance_compensation, disturbance_observer_step, uncertain_synapse, MismatchSpec};
pub use phase::{
    hco_motor_map, normalized_phase_error, phase_controller_step, rectify, wrap_half, MotorWiring, PhaseController,
    PhaseControllerConfig,
};
pub use tracking::{
    tracking_control, tracking_control_linearizing, ErrorInjection, ReferenceSignals, TrackingGains,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("invalid gains: {0}")]
    InvalidGains(String),
    #[error("domain error: {0}")]
    Domain(String),
}
