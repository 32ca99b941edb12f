//! Vector fields and parameter records: pendulum, FitzHugh-Nagumo neuron,
//! conductance synapse, bursting HCO neuron and pulse-coupled integrate-and-fire units.

mod fitzhugh_nagumo;
mod hco;
mod if_network;
mod pendulum;
mod synapse;

pub use fitzhugh_nagumo::{fn_dynamics, fn_rest_state, FnParams, FnState};
pub use hco::{hco_neuron_dynamics, hco_synaptic_current, HcoNetwork, HcoNeuronParams, HcoNeuronState};
pub use if_network::{Avalanche, IfNetwork, IfUnit};
pub use pendulum::{pendulum_dynamics, PendulumParams, PendulumState};
pub use synapse::{synapse_activation_dynamics, synapse_current, SynapseParams};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
}

/// Named parameter sets addressable from experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Preset {
    Fn(FnParams),
    Hco(HcoNeuronParams),
    Pendulum(PendulumParams),
    Synapse(SynapseParams),
}

pub const PRESET_NAMES: &[&str] = &["fn-classic", "paper-hco", "pendulum-plant", "synapse-default"];

pub fn preset(name: &str) -> Result<Preset, ModelError> {
    Ok(match name {
        "fn-classic" => Preset::Fn(FnParams::default()),
        "paper-hco" => Preset::Hco(HcoNeuronParams::default()),
        "pendulum-plant" => Preset::Pendulum(PendulumParams { a: 1.0, c: 1.5 }),
        "synapse-default" => Preset::Synapse(SynapseParams::default()),
        other => return Err(ModelError::UnknownPreset(other.to_string())),
    })
}
