use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::events::{Detector, EventTrain, OnlineDetector};
use crate::models::{fn_dynamics, fn_rest_state, FnParams, FnState};
use crate::sim::{integrate_observed, integrate_sampled, ResetSchedule, Signal, SignalSpec, System, TimeGrid, Trajectory};

/// One FN neuron under an input current.
pub struct DrivenFn<'a> {
    pub params: &'a FnParams,
    pub drive: &'a Signal,
}

impl System for DrivenFn<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn state_names(&self) -> Vec<String> {
        vec!["v".into(), "i_l".into()]
    }

    fn derivative(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        let i = self.drive.eval(t).expect("drive validated on the grid");
        dx.copy_from_slice(&fn_dynamics(FnState::new(x[0], x[1]), i, 0.0, 0.0, self.params));
    }
}

/// Spike train of a driven neuron, detected on the fly. When `stride` is set
/// the trajectory is also recorded at that stride.
pub fn driven_spikes(
    params: &FnParams,
    drive: &SignalSpec,
    x0: [f64; 2],
    grid: &TimeGrid,
    detection: &SpikeDetection,
    stride: Option<usize>,
) -> Result<(Vec<f64>, Option<Trajectory>), ExperimentError> {
    let drive = drive.prepare(grid.t0, grid.t_end)?;
    let mut sys = DrivenFn { params, drive: &drive };
    let mut online = OnlineDetector::new(Detector::up(detection.threshold, detection.refractory));
    let mut times = Vec::new();
    integrate_observed(&mut sys, &x0, grid, &ResetSchedule::none(), |t, x| {
        if let Some(e) = online.push(t, x[0]) {
            times.push(e);
        }
    })?;
    let traj = match stride {
        Some(s) => Some(integrate_sampled(&mut sys, &x0, grid, &ResetSchedule::none(), s)?),
        None => None,
    };
    Ok((times, traj))
}

/// Spike detector settings on the FN voltage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpikeDetection {
    pub threshold: f64,
    pub refractory: f64,
}

impl Default for SpikeDetection {
    fn default() -> Self {
        SpikeDetection { threshold: 1.0, refractory: 5.0 }
    }
}

impl SpikeDetection {
    pub fn spikes(&self, traj: &Trajectory, column: &str, trial: usize, label: &str) -> Result<EventTrain, ExperimentError> {
        let values = traj.column(column).ok_or_else(|| ExperimentError::Runtime(format!("no column {column}")))?;
        let times = Detector::up(self.threshold, self.refractory).detect(traj.grid.t0, traj.grid.dt, values);
        Ok(EventTrain { trial_id: trial, label: label.to_string(), times })
    }
}

/// Initial states drawn uniformly in a box around the resting state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialBox {
    pub half_width_v: f64,
    pub half_width_i: f64,
}

impl InitialBox {
    pub fn sample(&self, params: &FnParams, seed: u64, stream: u64) -> [f64; 2] {
        let rest = fn_rest_state(params, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let dv = self.half_width_v * (2.0 * rng.random::<f64>() - 1.0);
        let di = self.half_width_i * (2.0 * rng.random::<f64>() - 1.0);
        [rest.v + dv, rest.i_l + di]
    }
}

/// Derives a noise seed for a named purpose and index from the run seed.
pub fn derived_seed(seed: u64, purpose: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose);
    rng.set_word_pos(2 * index as u128);
    rng.random()
}
