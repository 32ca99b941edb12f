use serde::{Deserialize, Serialize};

use super::ControlError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseControllerConfig {
    /// Pulse amplitude `A`.
    pub amplitude: f64,
    /// Pulse width `w_p`.
    pub width: f64,
    /// Burst-onset threshold on the controlled neuron's slow voltage.
    pub onset_threshold: f64,
    /// Gain on the normalized phase error.
    pub gain: f64,
}

impl PhaseControllerConfig {
    pub fn validate(&self) -> Result<(), ControlError> {
        if !(self.amplitude >= 0.0) || !(self.width > 0.0) {
            return Err(ControlError::InvalidGains(format!(
                "phase controller needs A >= 0 and w_p > 0, got A = {}, w_p = {}",
                self.amplitude, self.width
            )));
        }
        Ok(())
    }
}

/// Wraps a phase into `(−1/2, 1/2]`.
#[inline]
pub fn wrap_half(x: f64) -> f64 {
    let y = x - x.round();
    if y <= -0.5 {
        y + 1.0
    } else {
        y
    }
}

/// Normalized phase error of a measured event at `t_meas` against the internal
/// burst onsets that precede it, or `None` while fewer than two onsets exist.
pub fn normalized_phase_error(t_meas: f64, onsets: &[f64]) -> Option<f64> {
    let n = onsets.partition_point(|&t| t <= t_meas);
    if n < 2 {
        return None;
    }
    let period = (onsets[n - 1] - onsets[0]) / (n - 1) as f64;
    Some(wrap_half((t_meas - onsets[n - 1]) / period))
}

/// Pulse current `i_p(t)` for the given causal event histories.
///
/// The most recent measured event at or before `t` opens a rectangular pulse of
/// width `w_p` and amplitude `A·gain·Δφ`. Outside pulses, or while the burst
/// period is undefined, the output is zero.
pub fn phase_controller_step(measured: &[f64], onsets: &[f64], cfg: &PhaseControllerConfig, t: f64) -> f64 {
    let n = measured.partition_point(|&tm| tm <= t);
    if n == 0 {
        return 0.0;
    }
    let t_meas = measured[n - 1];
    if t - t_meas >= cfg.width {
        return 0.0;
    }
    match normalized_phase_error(t_meas, onsets) {
        Some(dphi) => cfg.amplitude * cfg.gain * dphi,
        None => 0.0,
    }
}

/// Online form of [`phase_controller_step`]: events are appended as they are
/// detected and the pulse level is held constant between updates.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseController {
    pub cfg: PhaseControllerConfig,
    measured: Vec<f64>,
    onsets: Vec<f64>,
    level: f64,
    until: f64,
}

impl PhaseController {
    pub fn new(cfg: PhaseControllerConfig) -> Self {
        PhaseController { cfg, measured: Vec::new(), onsets: Vec::new(), level: 0.0, until: f64::NEG_INFINITY }
    }

    pub fn record_onset(&mut self, t: f64) {
        self.onsets.push(t);
    }

    /// Registers a measured event and arms the corresponding pulse.
    pub fn record_measured(&mut self, t: f64) {
        self.measured.push(t);
        self.level = match normalized_phase_error(t, &self.onsets) {
            Some(dphi) => self.cfg.amplitude * self.cfg.gain * dphi,
            None => 0.0,
        };
        self.until = t + self.cfg.width;
    }

    /// Pulse level at time `t`.
    #[inline]
    pub fn output(&self, t: f64) -> f64 {
        if t < self.until {
            self.level
        } else {
            0.0
        }
    }

    pub fn measured(&self) -> &[f64] {
        &self.measured
    }

    pub fn onsets(&self) -> &[f64] {
        &self.onsets
    }
}

/// Rectifier `σ(v) = max(v − v_th, 0)`.
#[inline]
pub fn rectify(v: f64, v_th: f64) -> f64 {
    (v - v_th).max(0.0)
}

/// Antagonistic motor pair: `u = g_m (σ(v_1) − σ(v_3))`.
#[inline]
pub fn hco_motor_map(v1: f64, v3: f64, g_m: f64, v_th: f64) -> f64 {
    g_m * (rectify(v1, v_th) - rectify(v3, v_th))
}

/// How the two motors combine into the pendulum torque.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotorWiring {
    /// Opposing torques, [`hco_motor_map`].
    Antagonistic,
    /// Both motors push in the same direction: `u = g_m (σ(v_1) + σ(v_3))`.
    Synergistic,
}

impl MotorWiring {
    #[inline]
    pub fn torque(self, v1: f64, v3: f64, g_m: f64, v_th: f64) -> f64 {
        match self {
            MotorWiring::Antagonistic => hco_motor_map(v1, v3, g_m, v_th),
            MotorWiring::Synergistic => g_m * (rectify(v1, v_th) + rectify(v3, v_th)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: PhaseControllerConfig = PhaseControllerConfig { amplitude: 1.0, width: 0.5, onset_threshold: -1.0, gain: 1.0 };

    #[test]
    fn silent_without_measurements() {
        let onsets = [0.0, 10.0, 20.0];
        for k in 0..300 {
            assert_eq!(phase_controller_step(&[], &onsets, &CFG, k as f64 * 0.1), 0.0);
        }
    }

    #[test]
    fn coincident_event_gives_zero_pulse() {
        let onsets = [0.0, 10.0, 20.0];
        assert_eq!(phase_controller_step(&[20.0], &onsets, &CFG, 20.1), 0.0);
    }

    #[test]
    fn quarter_period_lag() {
        let onsets = [0.0, 10.0, 20.0];
        let measured = [22.5];
        assert_eq!(phase_controller_step(&measured, &onsets, &CFG, 22.4), 0.0);
        assert!((phase_controller_step(&measured, &onsets, &CFG, 22.5) - 0.25).abs() <= 1e-12);
        assert!((phase_controller_step(&measured, &onsets, &CFG, 22.99) - 0.25).abs() <= 1e-12);
        assert_eq!(phase_controller_step(&measured, &onsets, &CFG, 23.0), 0.0);
    }

    #[test]
    fn undefined_period_gives_zero() {
        assert_eq!(phase_controller_step(&[5.0], &[1.0], &CFG, 5.1), 0.0);
        assert_eq!(normalized_phase_error(5.0, &[]), None);
    }

    #[test]
    fn wrapping() {
        assert_eq!(wrap_half(0.5), 0.5);
        assert_eq!(wrap_half(-0.5), 0.5);
        assert!((wrap_half(0.75) + 0.25).abs() < 1e-15);
        assert!((wrap_half(-1.2) + 0.2).abs() < 1e-12);
    }

    #[test]
    fn online_matches_pure() {
        let onsets = [0.0, 9.0, 21.0, 30.0];
        let measured = [12.0, 25.5, 33.0];
        let mut ctl = PhaseController::new(CFG);
        let (mut io, mut im) = (0, 0);
        for k in 0..400 {
            let t = k as f64 * 0.1;
            while io < onsets.len() && onsets[io] <= t + 1e-12 {
                ctl.record_onset(onsets[io]);
                io += 1;
            }
            while im < measured.len() && measured[im] <= t + 1e-12 {
                ctl.record_measured(measured[im]);
                im += 1;
            }
            let pure = phase_controller_step(&measured, &onsets, &CFG, t);
            assert!((ctl.output(t) - pure).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn motor_map_examples() {
        assert_eq!(hco_motor_map(1.3, 1.3, 2.0, 0.5), 0.0);
        assert!((hco_motor_map(1.5, 0.2, 2.0, 0.5) - 2.0).abs() <= 1e-12);
        assert_eq!(hco_motor_map(0.1, -0.4, 2.0, 0.5), 0.0);
        assert_eq!(MotorWiring::Antagonistic.torque(1.5, 0.2, 2.0, 0.5), hco_motor_map(1.5, 0.2, 2.0, 0.5));
        assert!((MotorWiring::Synergistic.torque(1.5, 1.5, 2.0, 0.5) - 4.0).abs() <= 1e-12);
    }
}
