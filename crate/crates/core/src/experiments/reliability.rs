//! Spike-time reliability of an FN neuron across trials.
//!
//! Protocol A drives every trial with the same constant step, protocol B with
//! the same frozen-noise realization. Each trial starts from its own random
//! state near rest and receives a small private noise current.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fn_common::{derived_seed, driven_spikes, InitialBox, SpikeDetection};
use super::tracking::check_signal;
use super::{Experiment, ExperimentError, GridParams, Outcome};
use crate::events::{circular_spread, phase_offset, reliability, EventTrain};
use crate::models::FnParams;
use crate::sim::SignalSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub grid: GridParams,
    pub neuron: FnParams,
    pub trials: usize,
    /// Constant drive of protocol A.
    pub step_level: f64,
    /// Shared frozen noise of protocol B; its seed is derived from the run seed.
    pub noise_mean: f64,
    pub noise_std: f64,
    pub noise_hold: f64,
    /// Private per-trial noise std as a fraction of `noise_std`.
    pub private_fraction: f64,
    /// Hold time of the private noise.
    pub private_hold: f64,
    pub initial: InitialBox,
    pub spikes: SpikeDetection,
    /// Matching window for reliability.
    pub match_window: f64,
    /// Fraction of the horizon discarded before comparing trials.
    pub transient_fraction: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            grid: GridParams::new(1000.0, 20),
            neuron: FnParams::default(),
            trials: 25,
            step_level: 0.5,
            noise_mean: 0.0,
            noise_std: 1.5,
            noise_hold: 5.0,
            private_fraction: 0.05,
            private_hold: 0.1,
            initial: InitialBox { half_width_v: 3.0, half_width_i: 2.0 },
            spikes: SpikeDetection::default(),
            match_window: 2.0,
            transient_fraction: 0.2,
        }
    }
}

const SHARED_NOISE: u64 = 1;
const PRIVATE_NOISE: u64 = 2;
const INITIAL_STATE: u64 = 3;

impl Params {
    fn private_noise(&self, seed: u64, protocol: u64, trial: usize) -> SignalSpec {
        let s = derived_seed(seed, PRIVATE_NOISE, protocol * 1_000_000 + trial as u64);
        SignalSpec::frozen_noise(0.0, self.private_fraction * self.noise_std, self.private_hold, s)
    }

    fn shared_noise(&self, seed: u64) -> SignalSpec {
        SignalSpec::frozen_noise(self.noise_mean, self.noise_std, self.noise_hold, derived_seed(seed, SHARED_NOISE, 0))
    }

    fn run_protocol(
        &self,
        seed: u64,
        protocol: u64,
        base: &SignalSpec,
        label: &str,
    ) -> Result<(Vec<EventTrain>, crate::sim::Trajectory), ExperimentError> {
        let grid = self.grid.grid()?;
        let results: Vec<_> = (0..self.trials)
            .into_par_iter()
            .map(|k| {
                let drive = SignalSpec::Sum { terms: vec![base.clone(), self.private_noise(seed, protocol, k)] };
                let x0 = self.initial.sample(&self.neuron, seed, INITIAL_STATE * 1_000_000 + protocol * 1000 + k as u64);
                let stride = (k == 0).then_some(self.grid.record_stride);
                let (times, traj) = driven_spikes(&self.neuron, &drive, x0, &grid, &self.spikes, stride)?;
                Ok((EventTrain { trial_id: k, label: label.to_string(), times }, traj))
            })
            .collect::<Result<_, ExperimentError>>()?;
        let mut trains = Vec::with_capacity(results.len());
        let mut first = None;
        for (train, traj) in results {
            trains.push(train);
            if traj.is_some() {
                first = traj;
            }
        }
        Ok((trains, first.expect("trial 0 recorded")))
    }
}

/// Circular spread, in cycles, of each trial's phase relative to trial 0.
/// Trials without a measurable phase are skipped.
pub fn phase_dispersion(trains: &[EventTrain]) -> Option<f64> {
    let phases: Vec<f64> = trains.iter().filter_map(|t| phase_offset(t, &trains[0]).ok()).collect();
    if phases.len() < 2 {
        return None;
    }
    Some(circular_spread(&phases))
}

impl Experiment for Params {
    const ID: &'static str = "reliability";

    fn grid_mut(&mut self) -> &mut GridParams {
        &mut self.grid
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        self.neuron.validate()?;
        if self.trials < 2 {
            return Err(ExperimentError::Config("reliability needs at least 2 trials".into()));
        }
        if !(self.match_window > 0.0) || !(0.0..1.0).contains(&self.transient_fraction) {
            return Err(ExperimentError::Config("match_window must be > 0 and transient_fraction in [0, 1)".into()));
        }
        let grid = self.grid.grid()?;
        check_signal("shared noise", &self.shared_noise(0), &grid)?;
        check_signal("private noise", &self.private_noise(0, 0, 0), &grid)?;
        Ok(())
    }

    fn run(&self, seed: u64) -> Result<Outcome, ExperimentError> {
        let mut out = Outcome::default();
        let t_end = self.grid.t_end;
        let from = self.transient_fraction * t_end;

        let (step_trains, step_traj) = self.run_protocol(seed, 0, &SignalSpec::constant(self.step_level), "step")?;
        let (noise_trains, noise_traj) = self.run_protocol(seed, 1, &self.shared_noise(seed), "noise")?;

        for (name, trains) in [("step", &step_trains), ("noise", &noise_trains)] {
            let late: Vec<EventTrain> = trains.iter().map(|t| t.window(from, t_end)).collect();
            let rel = reliability(&late, self.match_window)?;
            let isi = late[0].mean_interval().unwrap_or(f64::NAN);
            out.set(format!("{name}.matched_fraction"), rel.matched_fraction);
            out.set(format!("{name}.jitter"), rel.jitter);
            if isi.is_finite() {
                out.set(format!("{name}.mean_isi"), isi);
                out.set(format!("{name}.jitter_over_isi"), rel.jitter / isi);
            }
            let quarter: Vec<EventTrain> = trains.iter().map(|t| t.window(0.75 * t_end, t_end)).collect();
            if let Some(d) = phase_dispersion(&quarter) {
                out.set(format!("{name}.final_quarter_phase_dispersion"), d);
            }
        }
        // limit-cycle period of the step response, from trial 0 after the transient
        if let Some(period) = step_trains[0].window(from, t_end).mean_interval() {
            out.set("step.period", period);
        }
        out.trajectories.push(("step_trial0".into(), step_traj));
        out.trajectories.push(("noise_trial0".into(), noise_traj));
        out.events = step_trains.into_iter().chain(noise_trains).collect();
        Ok(out)
    }
}
