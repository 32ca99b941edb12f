//! Trajectory regulation and event regulation of excitable systems.
//!
//! The crate bundles a fixed-step simulator, the neuron, synapse and pendulum
//! models, internal-model and event-based controllers, event metrics and a
//! catalog of reproducible experiments driven by JSON configs.

pub mod controllers;
pub mod events;
pub mod models;
pub mod sim;
pub mod experiments;
