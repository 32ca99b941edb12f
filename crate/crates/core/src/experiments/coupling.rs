//! Diffusive versus synaptic coupling of two heterogeneous FN neurons.
//!
//! Both neurons receive the same pulse train. Neuron 2 has a higher threshold
//! and does not answer the pulses on its own. Coupling runs from neuron 1 to
//! neuron 2 only: diffusive as master-slave feedback `−k (v2 − v1)`, synaptic
//! as a conductance gated by `v1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fn_common::SpikeDetection;
use super::rejection::{column_distance, spike_synapse};
use super::tracking::check_signal;
use super::{Experiment, ExperimentError, GridParams, Outcome};
use crate::controllers::{diffusive_coupling, synaptic_coupling_current};
use crate::events::{match_trains, EventTrain};
use crate::models::{fn_dynamics, fn_rest_state, synapse_activation_dynamics, FnParams, FnState, SynapseParams};
use crate::sim::{integrate_sampled, ResetSchedule, Signal, SignalSpec, System, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    None,
    Diffusive(f64),
    Synaptic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub grid: GridParams,
    pub neurons: [FnParams; 2],
    pub drive: SignalSpec,
    pub synapse: SynapseParams,
    /// Diffusive gains, swept in increasing order.
    pub diffusive_gains: Vec<f64>,
    pub spikes: SpikeDetection,
    pub match_window: f64,
    pub transient: f64,
    /// Matched fraction at which a condition counts as event synchronized.
    pub sync_level: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            grid: GridParams::new(1000.0, 10),
            neurons: [FnParams::default(), FnParams { a: 1.1, l: 15.0, ..FnParams::default() }],
            drive: SignalSpec::pulse_train(0.4, 5.0, 40.0, 10.0),
            synapse: spike_synapse(),
            diffusive_gains: vec![0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 1.0, 2.0, 5.0],
            spikes: SpikeDetection::default(),
            match_window: 3.0,
            transient: 100.0,
            sync_level: 0.9,
        }
    }
}

pub struct CoupledPair<'a> {
    pub neurons: &'a [FnParams; 2],
    pub synapse: &'a SynapseParams,
    pub drive: &'a Signal,
    pub coupling: Coupling,
}

impl CoupledPair<'_> {
    fn current_into_2(&self, x: &[f64]) -> f64 {
        match self.coupling {
            Coupling::None => 0.0,
            Coupling::Diffusive(k) => diffusive_coupling(x[2], x[0], k, 0.0).0,
            Coupling::Synaptic => synaptic_coupling_current(x[4], x[2], self.synapse),
        }
    }
}

impl System for CoupledPair<'_> {
    fn dim(&self) -> usize {
        5
    }

    fn state_names(&self) -> Vec<String> {
        ["v1", "i1", "v2", "i2", "z"].map(String::from).to_vec()
    }

    fn derivative(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        let i = self.drive.eval(t).expect("drive validated on the grid");
        let n1 = fn_dynamics(FnState::new(x[0], x[1]), i, 0.0, 0.0, &self.neurons[0]);
        let n2 = fn_dynamics(FnState::new(x[2], x[3]), i, self.current_into_2(x), 0.0, &self.neurons[1]);
        dx[..2].copy_from_slice(&n1);
        dx[2..4].copy_from_slice(&n2);
        dx[4] = synapse_activation_dynamics(x[4], x[0], self.synapse);
    }

    fn output_names(&self) -> Vec<String> {
        vec!["u2".into()]
    }

    fn outputs(&self, _t: f64, x: &[f64], out: &mut [f64]) {
        out[0] = self.current_into_2(x);
    }
}

struct ConditionResult {
    label: String,
    traj: Trajectory,
    trains: [EventTrain; 2],
    matched: f64,
    lag: Option<f64>,
    rms: f64,
}

impl Params {
    fn simulate(&self, coupling: Coupling) -> Result<ConditionResult, ExperimentError> {
        let grid = self.grid.grid()?;
        let drive = self.drive.prepare(grid.t0, grid.t_end)?;
        let mut sys = CoupledPair { neurons: &self.neurons, synapse: &self.synapse, drive: &drive, coupling };
        let r1 = fn_rest_state(&self.neurons[0], 0.0);
        let r2 = fn_rest_state(&self.neurons[1], 0.0);
        let x0 = [r1.v, r1.i_l, r2.v, r2.i_l, self.synapse.activation(r1.v)];
        let traj = integrate_sampled(&mut sys, &x0, &grid, &ResetSchedule::none(), 1)?;
        let label = match coupling {
            Coupling::None => "none".to_string(),
            Coupling::Diffusive(k) => format!("diffusive_k{k}"),
            Coupling::Synaptic => "synaptic".to_string(),
        };
        let t1 = self.spikes.spikes(&traj, "v1", 0, format!("{label}.v1").as_str())?;
        let t2 = self.spikes.spikes(&traj, "v2", 1, format!("{label}.v2").as_str())?;
        let end = self.grid.t_end;
        let rep = match_trains(&t1.window(self.transient, end), &t2.window(self.transient, end), self.match_window);
        let (_, rms) = column_distance(&traj, "v1", "v2", self.transient);
        let lag = (!rep.offsets.is_empty()).then(|| rep.offsets.iter().sum::<f64>() / rep.offsets.len() as f64);
        Ok(ConditionResult { label, traj, trains: [t1, t2], matched: rep.matched_fraction, lag, rms })
    }
}

impl Experiment for Params {
    const ID: &'static str = "coupling-comparison";

    fn grid_mut(&mut self) -> &mut GridParams {
        &mut self.grid
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        for n in &self.neurons {
            n.validate()?;
        }
        self.synapse.validate()?;
        check_signal("drive", &self.drive, &self.grid.grid()?)?;
        if self.diffusive_gains.windows(2).any(|w| !(w[1] > w[0])) || self.diffusive_gains.iter().any(|k| !(*k >= 0.0)) {
            return Err(ExperimentError::Config("diffusive_gains must be nonnegative and increasing".into()));
        }
        if !(self.match_window > 0.0) {
            return Err(ExperimentError::Config("match_window must be > 0".into()));
        }
        Ok(())
    }

    fn run(&self, _seed: u64) -> Result<Outcome, ExperimentError> {
        let mut out = Outcome::default();
        let conditions: Vec<Coupling> = [Coupling::None, Coupling::Synaptic]
            .into_iter()
            .chain(self.diffusive_gains.iter().map(|&k| Coupling::Diffusive(k)))
            .collect();
        let results = conditions
            .par_iter()
            .map(|&c| self.simulate(c))
            .collect::<Result<Vec<_>, ExperimentError>>()?;

        for r in &results {
            for (n, t) in r.trains.iter().enumerate() {
                out.set(format!("{}.spikes_{}", r.label, n + 1), t.window(self.transient, self.grid.t_end).len() as f64);
            }
            out.set(format!("{}.matched_fraction", r.label), r.matched);
            out.set(format!("{}.rms_dv", r.label), r.rms);
            if let Some(lag) = r.lag {
                out.set(format!("{}.mean_lag", r.label), lag);
            }
        }
        let synaptic_rms = results[1].rms;
        if let Some((k, r)) = self.diffusive_gains.iter().zip(&results[2..]).find(|(_, r)| r.matched >= self.sync_level) {
            out.set("diffusive.first_sync_gain", *k);
            out.set("diffusive.first_sync_rms_dv", r.rms);
            out.set("diffusive.first_sync_rms_ratio", r.rms / synaptic_rms);
        }
        let mut trains = Vec::new();
        for (k, r) in results.into_iter().enumerate() {
            let [mut a, mut b] = r.trains;
            a.trial_id = 2 * k;
            b.trial_id = 2 * k + 1;
            trains.extend([a, b]);
            if k < 2 || out.metric("diffusive.first_sync_gain") == Some(conditions[k].gain()) {
                out.trajectories.push((r.label, r.traj.decimate(self.grid.record_stride)?));
            }
        }
        out.events = trains;
        Ok(out)
    }
}

impl Coupling {
    fn gain(self) -> f64 {
        match self {
            Coupling::Diffusive(k) => k,
            _ => f64::NAN,
        }
    }
}
