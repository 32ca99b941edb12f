use serde::{Deserialize, Serialize};

use super::ModelError;

/// First-order conductance synapse:
///
/// ```text
/// τ ż = −z + h(w)
/// d   = g·z·(v − E_syn)
/// ```
///
/// with `h(w) = 1 / (1 + exp(−h_gain·(w − h_center)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynapseParams {
    pub tau: f64,
    pub g: f64,
    pub e_syn: f64,
    pub h_gain: f64,
    pub h_center: f64,
}

impl Default for SynapseParams {
    fn default() -> Self {
        SynapseParams { tau: 1.0, g: 2.0, e_syn: -2.0, h_gain: 2.0, h_center: -1.0 }
    }
}

impl SynapseParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.tau > 0.0) || !(self.g >= 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "synapse needs tau > 0 and g >= 0, got tau = {}, g = {}",
                self.tau, self.g
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn activation(&self, w: f64) -> f64 {
        1.0 / (1.0 + (-self.h_gain * (w - self.h_center)).exp())
    }
}

/// `ż = (−z + h(w)) / τ`
#[inline]
pub fn synapse_activation_dynamics(z: f64, w: f64, p: &SynapseParams) -> f64 {
    (-z + p.activation(w)) / p.tau
}

/// `d = g·z·(v − E_syn)`
#[inline]
pub fn synapse_current(z: f64, v: f64, p: &SynapseParams) -> f64 {
    p.g * z * (v - p.e_syn)
}
