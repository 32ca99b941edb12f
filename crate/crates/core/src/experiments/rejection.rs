//! Synaptic disturbance rejection on an FN neuron.
//!
//! A presynaptic neuron drives a synapse whose current disturbs the plant.
//! Three plant copies share the same drive and initial state: unperturbed,
//! perturbed (disturbance only) and compensated (disturbance plus the
//! internal-model current `u = −g ẑ (v − E_syn)`, switched on at `control_on`).

use serde::{Deserialize, Serialize};

use super::fn_common::{derived_seed, SpikeDetection};
use super::tracking::check_signal;
use super::{Experiment, ExperimentError, GridParams, Outcome};
use crate::controllers::{disturbance_compensation, disturbance_observer_step};
use crate::events::{match_trains, phase_offset, spurious_count, EventTrain};
use crate::models::{
    fn_dynamics, fn_rest_state, synapse_activation_dynamics, synapse_current, FnParams, FnState, SynapseParams,
};
use crate::sim::{integrate_sampled, ResetSchedule, Signal, SignalSpec, System, Trajectory};

/// Circuit shared by the rejection experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitParams {
    pub neuron: FnParams,
    pub presynaptic: FnParams,
    pub synapse: SynapseParams,
    /// Time at which the compensating current is switched on.
    pub control_on: f64,
}

impl Default for CircuitParams {
    fn default() -> Self {
        CircuitParams {
            neuron: FnParams::default(),
            presynaptic: FnParams::default(),
            synapse: spike_synapse(),
            control_on: 100.0,
        }
    }
}

/// Synapse activated by FN spikes only: `h` is centred between rest and the
/// spike plateau.
pub fn spike_synapse() -> SynapseParams {
    SynapseParams { tau: 1.0, g: 2.0, e_syn: -2.0, h_gain: 4.0, h_center: 0.5 }
}

impl CircuitParams {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.neuron.validate()?;
        self.presynaptic.validate()?;
        self.synapse.validate()?;
        if !self.control_on.is_finite() {
            return Err(ExperimentError::Config("control_on must be finite".into()));
        }
        Ok(())
    }

    /// Simulates the circuit with `model` as the internal-model synapse.
    pub fn simulate(
        &self,
        model: &SynapseParams,
        drive: &SignalSpec,
        presynaptic_drive: &SignalSpec,
        grid: &GridParams,
    ) -> Result<Trajectory, ExperimentError> {
        let g = grid.grid()?;
        let drive = drive.prepare(g.t0, g.t_end)?;
        let presynaptic_drive = presynaptic_drive.prepare(g.t0, g.t_end)?;
        let mut sys = SynapticCircuit {
            circuit: self,
            model,
            drive: &drive,
            presynaptic_drive: &presynaptic_drive,
        };
        let pre = fn_rest_state(&self.presynaptic, 0.0);
        let post = fn_rest_state(&self.neuron, 0.0);
        let z0 = self.synapse.activation(pre.v);
        let x0 = [pre.v, pre.i_l, z0, z0, post.v, post.i_l, post.v, post.i_l, post.v, post.i_l];
        Ok(integrate_sampled(&mut sys, &x0, &g, &ResetSchedule::none(), 1)?)
    }
}

pub struct SynapticCircuit<'a> {
    pub circuit: &'a CircuitParams,
    pub model: &'a SynapseParams,
    pub drive: &'a Signal,
    pub presynaptic_drive: &'a Signal,
}

impl SynapticCircuit<'_> {
    fn control(&self, t: f64, x: &[f64]) -> f64 {
        if t >= self.circuit.control_on {
            disturbance_compensation(x[3], x[8], self.model)
        } else {
            0.0
        }
    }
}

impl System for SynapticCircuit<'_> {
    fn dim(&self) -> usize {
        10
    }

    fn state_names(&self) -> Vec<String> {
        ["v_pre", "i_pre", "z", "z_hat", "v_u", "i_u", "v_d", "i_d", "v_c", "i_c"].map(String::from).to_vec()
    }

    fn derivative(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        let c = self.circuit;
        let i = self.drive.eval(t).expect("drive validated on the grid");
        let i_pre = self.presynaptic_drive.eval(t).expect("drive validated on the grid");
        let pre = fn_dynamics(FnState::new(x[0], x[1]), i_pre, 0.0, 0.0, &c.presynaptic);
        dx[0] = pre[0];
        dx[1] = pre[1];
        dx[2] = synapse_activation_dynamics(x[2], x[0], &c.synapse);
        dx[3] = disturbance_observer_step(x[3], x[0], self.model);
        let plain = fn_dynamics(FnState::new(x[4], x[5]), i, 0.0, 0.0, &c.neuron);
        let d = synapse_current(x[2], x[6], &c.synapse);
        let perturbed = fn_dynamics(FnState::new(x[6], x[7]), i, 0.0, d, &c.neuron);
        let d = synapse_current(x[2], x[8], &c.synapse);
        let compensated = fn_dynamics(FnState::new(x[8], x[9]), i, 0.0, self.control(t, x) + d, &c.neuron);
        dx[4..6].copy_from_slice(&plain);
        dx[6..8].copy_from_slice(&perturbed);
        dx[8..10].copy_from_slice(&compensated);
    }

    fn output_names(&self) -> Vec<String> {
        ["d", "u"].map(String::from).to_vec()
    }

    fn outputs(&self, t: f64, x: &[f64], out: &mut [f64]) {
        out[0] = synapse_current(x[2], x[8], &self.circuit.synapse);
        out[1] = self.control(t, x);
    }
}

/// Spike trains of the presynaptic neuron and the three plant copies.
pub struct CircuitSpikes {
    pub presynaptic: EventTrain,
    pub unperturbed: EventTrain,
    pub perturbed: EventTrain,
    pub compensated: EventTrain,
}

impl CircuitSpikes {
    pub fn detect(traj: &Trajectory, spikes: &SpikeDetection) -> Result<Self, ExperimentError> {
        Ok(CircuitSpikes {
            presynaptic: spikes.spikes(traj, "v_pre", 0, "presynaptic")?,
            unperturbed: spikes.spikes(traj, "v_u", 1, "unperturbed")?,
            perturbed: spikes.spikes(traj, "v_d", 2, "perturbed")?,
            compensated: spikes.spikes(traj, "v_c", 3, "compensated")?,
        })
    }

    pub fn into_vec(self) -> Vec<EventTrain> {
        vec![self.presynaptic, self.unperturbed, self.perturbed, self.compensated]
    }
}

/// Largest and root-mean-square difference of two columns on `[from, end]`.
pub fn column_distance(traj: &Trajectory, a: &str, b: &str, from: f64) -> (f64, f64) {
    let (xa, xb) = (traj.column(a).expect("column"), traj.column(b).expect("column"));
    let k0 = ((from - traj.grid.t0) / traj.grid.dt).ceil().max(0.0) as usize;
    let mut max = 0.0f64;
    let mut sq = 0.0;
    for (p, q) in xa[k0..].iter().zip(&xb[k0..]) {
        max = max.max((p - q).abs());
        sq += (p - q) * (p - q);
    }
    let n = xa.len().saturating_sub(k0).max(1) as f64;
    (max, (sq / n).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DcParams {
    pub grid: GridParams,
    pub circuit: CircuitParams,
    pub drive: SignalSpec,
    pub presynaptic_drive: SignalSpec,
    pub spikes: SpikeDetection,
    /// `[start, end)` window for periodicity and phase measurements.
    pub window: [f64; 2],
}

impl Default for DcParams {
    fn default() -> Self {
        DcParams {
            grid: GridParams::new(600.0, 10),
            circuit: CircuitParams::default(),
            drive: SignalSpec::constant(0.5),
            presynaptic_drive: SignalSpec::constant(0.8),
            spikes: SpikeDetection::default(),
            window: [200.0, 600.0],
        }
    }
}

impl Experiment for DcParams {
    const ID: &'static str = "fn-rejection-dc";

    fn grid_mut(&mut self) -> &mut GridParams {
        &mut self.grid
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        self.circuit.validate()?;
        let grid = self.grid.grid()?;
        check_signal("drive", &self.drive, &grid)?;
        check_signal("presynaptic_drive", &self.presynaptic_drive, &grid)?;
        Ok(())
    }

    fn run(&self, _seed: u64) -> Result<Outcome, ExperimentError> {
        let mut out = Outcome::default();
        let c = &self.circuit;
        let traj = c.simulate(&c.synapse, &self.drive, &self.presynaptic_drive, &self.grid)?;
        let spikes = CircuitSpikes::detect(&traj, &self.spikes)?;
        let [a, b] = self.window;
        let unperturbed = spikes.unperturbed.window(a, b);
        let compensated = spikes.compensated.window(a, b);
        for (name, train) in [("unperturbed", &unperturbed), ("compensated", &compensated)] {
            if let Some(cv) = train.interval_cv() {
                out.set(format!("{name}.isi_cv"), cv);
            }
            if let Some(isi) = train.mean_interval() {
                out.set(format!("{name}.mean_isi"), isi);
            }
        }
        if let Ok(x) = phase_offset(&compensated, &unperturbed) {
            out.set("compensated.phase_offset", x);
        }
        let before = spikes.perturbed.window(0.0, c.control_on);
        out.set(
            "perturbed.extra_spikes_before_control",
            spurious_count(&spikes.unperturbed.window(0.0, c.control_on), &before, 1.0) as f64,
        );
        let (_, rms) = column_distance(&traj, "v_u", "v_c", a);
        out.set("compensated.rms_dv", rms);
        out.events = spikes.into_vec();
        out.trajectories.push(("circuit".into(), traj.decimate(self.grid.record_stride)?));
        Ok(out)
    }
}

/// Held Gaussian noise statistics; the seed comes from the run seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseStats {
    pub mean: f64,
    pub std: f64,
    pub hold: f64,
}

impl NoiseStats {
    pub fn spec(&self, seed: u64) -> SignalSpec {
        SignalSpec::frozen_noise(self.mean, self.std, self.hold, seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    pub grid: GridParams,
    pub circuit: CircuitParams,
    pub drive: NoiseStats,
    pub presynaptic_drive: NoiseStats,
    pub spikes: SpikeDetection,
    /// Fraction of the horizon discarded before matching spikes.
    pub transient_fraction: f64,
    /// Matching window for unperturbed against compensated spikes.
    pub match_window: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            grid: GridParams::new(1000.0, 10),
            circuit: CircuitParams::default(),
            drive: NoiseStats { mean: 0.0, std: 1.5, hold: 5.0 },
            presynaptic_drive: NoiseStats { mean: 0.0, std: 1.5, hold: 5.0 },
            spikes: SpikeDetection::default(),
            transient_fraction: 0.2,
            match_window: 0.005,
        }
    }
}

const PLANT_NOISE: u64 = 11;
const PRESYNAPTIC_NOISE: u64 = 12;

impl Experiment for NoiseParams {
    const ID: &'static str = "fn-rejection-noise";

    fn grid_mut(&mut self) -> &mut GridParams {
        &mut self.grid
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        self.circuit.validate()?;
        let grid = self.grid.grid()?;
        check_signal("drive", &self.drive.spec(0), &grid)?;
        check_signal("presynaptic_drive", &self.presynaptic_drive.spec(0), &grid)?;
        if !(0.0..1.0).contains(&self.transient_fraction) || !(self.match_window > 0.0) {
            return Err(ExperimentError::Config("transient_fraction must be in [0, 1) and match_window > 0".into()));
        }
        Ok(())
    }

    fn run(&self, seed: u64) -> Result<Outcome, ExperimentError> {
        let mut out = Outcome::default();
        let c = &self.circuit;
        let drive = self.drive.spec(derived_seed(seed, PLANT_NOISE, 0));
        let pre = self.presynaptic_drive.spec(derived_seed(seed, PRESYNAPTIC_NOISE, 0));
        let traj = c.simulate(&c.synapse, &drive, &pre, &self.grid)?;
        let spikes = CircuitSpikes::detect(&traj, &self.spikes)?;
        let from = self.transient_fraction * self.grid.t_end;
        let t_end = self.grid.t_end;
        let base = spikes.unperturbed.window(from, t_end);
        let rep = match_trains(&base, &spikes.compensated.window(from, t_end), self.match_window);
        out.set("compensated.matched_fraction", rep.matched_fraction);
        out.set("compensated.extra", rep.extra_test.len() as f64);
        out.set("compensated.jitter", rep.jitter);
        out.set("unperturbed.spikes", base.len() as f64);
        out.set("presynaptic.spikes", spikes.presynaptic.window(from, t_end).len() as f64);
        out.set(
            "perturbed.spurious_count",
            spurious_count(&base, &spikes.perturbed.window(from, t_end), 1.0) as f64,
        );
        let (max, rms) = column_distance(&traj, "v_u", "v_c", from);
        out.set("compensated.max_abs_dv", max);
        out.set("compensated.rms_dv", rms);
        out.events = spikes.into_vec();
        out.trajectories.push(("circuit".into(), traj.decimate(self.grid.record_stride)?));
        Ok(out)
    }
}
