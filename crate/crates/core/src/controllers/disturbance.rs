use serde::{Deserialize, Serialize};

use super::ControlError;
use crate::models::{synapse_activation_dynamics, synapse_current, SynapseParams};

/// Internal-model observer of the synaptic activation: `τ ż̂ = −ẑ + h(w)`.
#[inline]
pub fn disturbance_observer_step(z_hat: f64, w: f64, p: &SynapseParams) -> f64 {
    synapse_activation_dynamics(z_hat, w, p)
}

/// Compensating current `u = −d̂ = −g ẑ (v − E_syn)`.
#[inline]
pub fn disturbance_compensation(z_hat: f64, v: f64, p: &SynapseParams) -> f64 {
    -synapse_current(z_hat, v, p)
}

/// Fractional mismatch `δ` applied to the synapse gain, reversal potential and time constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MismatchSpec {
    pub delta: f64,
}

/// Internal-model synapse with `g_in = g + δg`, `E_in = E + δE`, `τ_in = τ + δτ`.
pub fn uncertain_synapse(nominal: &SynapseParams, m: MismatchSpec) -> Result<SynapseParams, ControlError> {
    if !(m.delta > -1.0) {
        return Err(ControlError::Domain(format!("mismatch must exceed -1, got {}", m.delta)));
    }
    let scale = 1.0 + m.delta;
    let out = SynapseParams { tau: nominal.tau * scale, g: nominal.g * scale, e_syn: nominal.e_syn * scale, ..*nominal };
    if !(out.tau > 0.0) {
        return Err(ControlError::Domain(format!("mismatched time constant {} is not positive", out.tau)));
    }
    Ok(out)
}
