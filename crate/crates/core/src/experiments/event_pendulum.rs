//! A four-neuron HCO drives a pendulum through two motors. Threshold crossings
//! of θ are fed back to a pulse phase controller on neuron 1. Halfway through
//! the run the cross synapses switch from inhibitory to excitatory.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Experiment, ExperimentError, GridParams, Outcome};
use crate::controllers::{MotorWiring, PhaseController, PhaseControllerConfig};
use crate::events::{match_trains, phase_offset, Detector, EventTrain, OnlineDetector};
use crate::models::{pendulum_dynamics, HcoNetwork, HcoNeuronParams, PendulumParams, PendulumState};
use crate::sim::{integrate_observed, integrate_sampled, ResetSchedule, System, TimeGrid, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotorParams {
    pub gain: f64,
    pub threshold: f64,
    pub wiring: MotorWiring,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub grid: GridParams,
    /// Unscaled neuron; the network runs it with every time constant times `time_scale`.
    pub neuron: HcoNeuronParams,
    pub time_scale: f64,
    /// Cross-group gain before the switch.
    pub g_inhibitory: f64,
    /// Cross-group gain after the switch.
    pub g_excitatory: f64,
    pub switch_at: f64,
    pub pendulum: PendulumParams,
    pub motor: MotorParams,
    pub controller: PhaseControllerConfig,
    pub theta_threshold: f64,
    /// Minimum spacing of θ events and of burst onsets.
    pub refractory: f64,
    pub match_window: f64,
    /// Settling time discarded after the start and after the switch.
    pub transient: f64,
    /// Multipliers of `g_us⁺` for the open-loop burst period sweep.
    pub g_us_factors: Vec<f64>,
    pub sweep_t_end: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            grid: GridParams::new(400.0, 5),
            neuron: HcoNeuronParams::default(),
            time_scale: 0.005,
            g_inhibitory: -0.5,
            g_excitatory: 0.1,
            switch_at: 200.0,
            pendulum: PendulumParams { a: 1.0, c: 0.3 },
            motor: MotorParams { gain: 0.6, threshold: 0.7, wiring: MotorWiring::Synergistic },
            controller: PhaseControllerConfig { amplitude: 0.2, width: 0.2, onset_threshold: -1.0, gain: 1.0 },
            theta_threshold: 0.25,
            refractory: 2.0,
            match_window: 1.5,
            transient: 40.0,
            g_us_factors: vec![1.0, 1.1, 1.2],
            sweep_t_end: 150.0,
        }
    }
}

/// Initial state of the network: the two groups start on opposite sides of the burst cycle.
const X0_GROUP: [[f64; 3]; 2] = [[-1.0, -1.0, -1.0], [0.5, 0.0, -0.8]];

fn network_x0() -> Vec<f64> {
    (0..4).flat_map(|i| X0_GROUP[i / 2]).collect()
}

pub struct HcoPendulum<'a> {
    pub before: &'a HcoNetwork,
    pub after: &'a HcoNetwork,
    pub switch_at: f64,
    pub pendulum: &'a PendulumParams,
    pub motor: &'a MotorParams,
    pub controller: PhaseController,
    theta_events: OnlineDetector,
    onsets: Vec<OnlineDetector>,
    pub theta_times: Vec<f64>,
    pub onset_times: Vec<Vec<f64>>,
}

impl<'a> HcoPendulum<'a> {
    pub fn new(p: &'a Params, before: &'a HcoNetwork, after: &'a HcoNetwork) -> Self {
        let burst = Detector::up(p.controller.onset_threshold, p.refractory);
        HcoPendulum {
            before,
            after,
            switch_at: p.switch_at,
            pendulum: &p.pendulum,
            motor: &p.motor,
            controller: PhaseController::new(p.controller),
            theta_events: OnlineDetector::new(Detector::up(p.theta_threshold, p.refractory)),
            onsets: (0..4).map(|_| OnlineDetector::new(burst)).collect(),
            theta_times: Vec::new(),
            onset_times: vec![Vec::new(); 4],
        }
    }

    fn torque(&self, x: &[f64]) -> f64 {
        self.motor.wiring.torque(x[0], x[6], self.motor.gain, self.motor.threshold)
    }
}

impl System for HcoPendulum<'_> {
    fn dim(&self) -> usize {
        14
    }

    fn state_names(&self) -> Vec<String> {
        let mut names: Vec<String> =
            (1..=4).flat_map(|i| [format!("v_{i}"), format!("v_s{i}"), format!("v_us{i}")]).collect();
        names.extend(["theta".to_string(), "omega".to_string()]);
        names
    }

    fn derivative(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        let net = if t < self.switch_at { self.before } else { self.after };
        let i_p = [self.controller.output(t), 0.0, 0.0, 0.0];
        net.derivative(&x[..12], &i_p, &mut dx[..12]);
        let d = pendulum_dynamics(PendulumState::new(x[12], x[13]), self.torque(x), self.pendulum);
        dx[12..].copy_from_slice(&d);
    }

    fn output_names(&self) -> Vec<String> {
        vec!["u".into(), "i_p".into()]
    }

    fn outputs(&self, t: f64, x: &[f64], out: &mut [f64]) {
        out[0] = self.torque(x);
        out[1] = self.controller.output(t);
    }

    fn after_step(&mut self, t: f64, x: &[f64]) {
        for (i, det) in self.onsets.iter_mut().enumerate() {
            if let Some(te) = det.push(t, x[3 * i + 1]) {
                self.onset_times[i].push(te);
                if i == 0 {
                    self.controller.record_onset(te);
                }
            }
        }
        if let Some(te) = self.theta_events.push(t, x[12]) {
            self.theta_times.push(te);
            self.controller.record_measured(te);
        }
    }
}

impl Params {
    fn scaled_neuron(&self) -> HcoNeuronParams {
        self.neuron.time_scaled(self.time_scale)
    }

    /// Burst onsets of neuron 1 in the open-loop inhibitory network with `g_us⁺` scaled by `factor`.
    fn open_loop_onsets(&self, factor: f64) -> Result<Vec<f64>, ExperimentError> {
        let neuron = HcoNeuronParams { g_us_plus: self.neuron.g_us_plus * factor, ..self.neuron }.time_scaled(self.time_scale);
        let net = HcoNetwork::two_groups(neuron, self.g_inhibitory);
        let names = ["x"; 12];
        let mut sys = VectorField::new(&names, |_t, x: &[f64], dx: &mut [f64]| net.derivative(x, &[0.0; 4], dx));
        let grid = TimeGrid::new(0.0, self.sweep_t_end, self.grid.dt)?;
        let mut det = OnlineDetector::new(Detector::up(self.controller.onset_threshold, self.refractory));
        let mut onsets = Vec::new();
        integrate_observed(&mut sys, &network_x0(), &grid, &ResetSchedule::none(), |t, x| {
            if let Some(te) = det.push(t, x[1]) {
                onsets.push(te);
            }
        })?;
        Ok(onsets)
    }
}

fn train(id: usize, label: &str, times: &[f64], from: f64, to: f64) -> Result<EventTrain, ExperimentError> {
    Ok(EventTrain::new(id, label, times.to_vec())?.window(from, to))
}

fn peak_abs(traj: &crate::sim::Trajectory, column: &str, from: f64, to: f64) -> f64 {
    let values = traj.column(column).expect("column exists");
    traj.grid
        .times()
        .zip(values)
        .filter(|(t, _)| *t >= from && *t < to)
        .fold(0.0, |m, (_, v)| m.max(v.abs()))
}

impl Experiment for Params {
    const ID: &'static str = "event-pendulum";

    fn grid_mut(&mut self) -> &mut GridParams {
        &mut self.grid
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        self.neuron.validate()?;
        self.pendulum.validate()?;
        self.controller.validate()?;
        let grid = self.grid.grid()?;
        if !(self.time_scale > 0.0) {
            return Err(ExperimentError::Config("time_scale must be > 0".into()));
        }
        if !(self.switch_at - self.transient > grid.t0 + self.transient && self.switch_at + self.transient < grid.t_end) {
            return Err(ExperimentError::Config("switch_at must leave a transient on both sides within the grid".into()));
        }
        if !(self.refractory >= 0.0) || !(self.match_window > 0.0) || !(self.motor.gain >= 0.0) {
            return Err(ExperimentError::Config("refractory, match_window and motor gain must be positive".into()));
        }
        if self.g_us_factors.len() < 2 || self.g_us_factors.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ExperimentError::Config("g_us_factors must hold at least two increasing values".into()));
        }
        if !(self.sweep_t_end > self.transient) {
            return Err(ExperimentError::Config("sweep_t_end must exceed the transient".into()));
        }
        Ok(())
    }

    fn run(&self, _seed: u64) -> Result<Outcome, ExperimentError> {
        let mut out = Outcome::default();
        let neuron = self.scaled_neuron();
        let before = HcoNetwork::two_groups(neuron, self.g_inhibitory);
        let after = HcoNetwork::two_groups(neuron, self.g_excitatory);
        before.validate()?;

        let sweep = self
            .g_us_factors
            .par_iter()
            .map(|&f| self.open_loop_onsets(f))
            .collect::<Result<Vec<_>, ExperimentError>>()?;

        let grid = self.grid.grid()?;
        let mut sys = HcoPendulum::new(self, &before, &after);
        let mut x0 = network_x0();
        x0.extend([0.0, 0.0]);
        let traj = integrate_sampled(&mut sys, &x0, &grid, &ResetSchedule::none(), self.grid.record_stride)?;

        let windows = [("inhibitory", self.transient, self.switch_at), ("excitatory", self.switch_at + self.transient, grid.t_end)];
        for (name, from, to) in windows {
            let b1 = train(0, "burst_1", &sys.onset_times[0], from, to)?;
            let b3 = train(2, "burst_3", &sys.onset_times[2], from, to)?;
            out.set(format!("{name}.phase_offset"), phase_offset(&b1, &b3)?);
            if let Some(p) = b1.mean_interval() {
                out.set(format!("{name}.burst_period"), p);
            }
            let mut motor_bursts: Vec<f64> = b1.times.iter().chain(&b3.times).copied().collect();
            motor_bursts.sort_by(f64::total_cmp);
            motor_bursts.dedup_by(|later, earlier| *later - *earlier < self.refractory);
            let bursts = EventTrain::new(0, "motor_bursts", motor_bursts)?;
            let theta = train(4, "theta", &sys.theta_times, from - self.match_window, to + self.match_window)?;
            let rep = match_trains(&bursts, &theta, self.match_window);
            out.set(format!("{name}.theta_matched_fraction"), rep.matched_fraction);
            out.set(format!("{name}.theta_extra"), rep.extra_test.len() as f64);
            out.set(format!("{name}.theta_events"), theta.len() as f64);
            out.set(format!("{name}.peak_theta"), peak_abs(&traj, "theta", from, to));
        }
        let ratio = out.metric("excitatory.peak_theta").unwrap_or(0.0) / out.metric("inhibitory.peak_theta").unwrap_or(f64::NAN);
        if ratio.is_finite() {
            out.set("peak_theta_ratio", ratio);
        }

        let mut periods = Vec::new();
        for (f, onsets) in self.g_us_factors.iter().zip(&sweep) {
            let b = train(0, "sweep", onsets, self.transient, self.sweep_t_end)?;
            let p = b.mean_interval().unwrap_or(f64::NAN);
            if p.is_finite() {
                out.set(format!("g_us_x{f}.burst_period"), p);
            }
            periods.push(p);
        }
        let steps: Vec<f64> = periods.windows(2).map(|w| w[1] - w[0]).collect();
        let monotone = steps.iter().all(|d| *d > 0.0) || steps.iter().all(|d| *d < 0.0);
        out.flag("g_us_period_monotone", monotone);
        if monotone {
            out.set("g_us_period_direction", steps[0].signum());
        }

        let labels = ["burst_1", "burst_2", "burst_3", "burst_4"];
        for (i, times) in sys.onset_times.iter().enumerate() {
            out.events.push(EventTrain::new(i, labels[i], times.clone())?);
        }
        out.events.push(EventTrain::new(4, "theta", sys.theta_times.clone())?);
        out.trajectories.push(("closed_loop".into(), traj));
        Ok(out)
    }
}
