use serde::{Deserialize, Serialize};

use super::ControlError;
use crate::models::{pendulum_dynamics, PendulumParams, PendulumState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackingGains {
    pub k1: f64,
    pub k2: f64,
}

impl TrackingGains {
    /// Checks `k1 > 1` and `k2 > −c` for the plant damping `c`.
    pub fn validate(&self, plant: &PendulumParams) -> Result<(), ControlError> {
        if !(self.k1 > 1.0) || !(self.k2 > -plant.c) {
            return Err(ControlError::InvalidGains(format!(
                "need k1 > 1 and k2 > -c = {}, got k1 = {}, k2 = {}",
                -plant.c, self.k1, self.k2
            )));
        }
        Ok(())
    }
}

/// Reference signals available to the tracking law: position, velocity and
/// the exosystem torque.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSignals {
    pub theta_r: f64,
    pub omega_r: f64,
    pub u_r: f64,
}

/// `u = u_r − (a_r − 1) sin θ_r − (c_r − c) θ̇_r − k1 e − k2 ė`
///
/// Used with the true reference or with the internal-model estimate
/// `(θ̂_r, θ̂̇_r)` in place of `(θ_r, θ̇_r)`.
#[inline]
pub fn tracking_control(
    e: f64,
    e_dot: f64,
    r: ReferenceSignals,
    plant: &PendulumParams,
    reference: &PendulumParams,
    gains: &TrackingGains,
) -> f64 {
    r.u_r - (reference.a - plant.a) * r.theta_r.sin() - (reference.c - plant.c) * r.omega_r - gains.k1 * e - gains.k2 * e_dot
}

/// Tracking law with the plant nonlinearity and damping cancelled as well, so the
/// closed-loop error obeys exactly `ë + k2 ė + k1 e = 0`.
#[inline]
pub fn tracking_control_linearizing(
    plant_state: PendulumState,
    r: ReferenceSignals,
    plant: &PendulumParams,
    reference: &PendulumParams,
    gains: &TrackingGains,
) -> f64 {
    let e = plant_state.theta - r.theta_r;
    let e_dot = plant_state.omega - r.omega_r;
    let reference_accel = pendulum_dynamics(PendulumState::new(r.theta_r, r.omega_r), r.u_r, reference)[1];
    let plant_drift = pendulum_dynamics(plant_state, 0.0, plant)[1];
    reference_accel - plant_drift - gains.k1 * e - gains.k2 * e_dot
}

/// Output-error injection into the internal-model pendulum. The model torque is
/// `û_r = u_r − k_p (θ̂_r − θ_r) − k_d (θ̂̇_r − θ̇_r)`, where the estimate error is
/// computed from measured quantities as `θ̂_r − θ_r = e − ê`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorInjection {
    pub k_p: f64,
    pub k_d: f64,
}

impl Default for ErrorInjection {
    fn default() -> Self {
        ErrorInjection { k_p: 5.0, k_d: 4.0 }
    }
}

impl ErrorInjection {
    pub fn disabled() -> Self {
        ErrorInjection { k_p: 0.0, k_d: 0.0 }
    }

    /// Torque correction for the internal model given the measured errors
    /// `(e, ė)` and the estimated errors `(ê, ê̇)`.
    #[inline]
    pub fn torque(&self, e: f64, e_dot: f64, e_hat: f64, e_hat_dot: f64) -> f64 {
        -self.k_p * (e - e_hat) - self.k_d * (e_dot - e_hat_dot)
    }
}
