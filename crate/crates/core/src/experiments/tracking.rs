//! Pendulum tracking of a bistable exosystem through an internal model.
//!
//! State layout: exosystem `(θ_r, ω_r)`, plant `(θ, ω)`, internal model `(θ̂_r, ω̂_r)`.
//! The plant controller only sees the internal model; the model is corrected
//! by output-error injection when enabled.

use serde::{Deserialize, Serialize};

use super::{Experiment, ExperimentError, GridParams, Outcome};
use crate::controllers::{tracking_control, ErrorInjection, ReferenceSignals, TrackingGains};
use crate::models::{pendulum_dynamics, PendulumParams, PendulumState};
use crate::sim::{integrate_sampled, Reset, ResetSchedule, Signal, SignalSpec, System, TimeGrid, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExoReset {
    pub time: f64,
    /// New angle; `None` keeps the current angle.
    #[serde(default)]
    pub theta: Option<f64>,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub grid: GridParams,
    pub plant: PendulumParams,
    /// Exosystem pendulum; also the internal-model parameters.
    pub reference: PendulumParams,
    pub u_r: SignalSpec,
    pub gains: TrackingGains,
    pub injection: ErrorInjection,
    pub exo_initial: [f64; 2],
    pub plant_initial: [f64; 2],
    pub model_initial: [f64; 2],
    pub resets: Vec<ExoReset>,
    /// Half-open `[start, end)` windows on which `|e|` is checked.
    pub windows: Vec<[f64; 2]>,
    pub tolerance: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            grid: GridParams::new(200.0, 10),
            plant: PendulumParams { a: 1.0, c: 1.5 },
            reference: PendulumParams { a: 1.0, c: 0.25 },
            u_r: SignalSpec::sinusoid(0.5, 0.5, 1.0, 0.0),
            gains: TrackingGains { k1: 4.0, k2: 2.0 },
            injection: ErrorInjection::default(),
            exo_initial: [0.3, 0.0],
            plant_initial: [-0.5, 0.0],
            model_initial: [0.0, 0.0],
            resets: vec![
                ExoReset { time: 80.0, theta: None, omega: 3.0 },
                ExoReset { time: 130.0, theta: None, omega: 0.0 },
            ],
            windows: vec![[60.0, 80.0], [110.0, 130.0], [160.0, 200.0]],
            tolerance: 1e-3,
        }
    }
}

/// Closed loop of exosystem, plant and internal model.
pub struct TrackingLoop<'a> {
    pub plant: &'a PendulumParams,
    pub reference: &'a PendulumParams,
    pub gains: &'a TrackingGains,
    pub injection: ErrorInjection,
    pub u_r: &'a Signal,
}

impl TrackingLoop<'_> {
    fn control(&self, x: &[f64], u_r: f64) -> (f64, f64) {
        let (e, e_dot) = (x[2] - x[0], x[3] - x[1]);
        let (e_hat, e_hat_dot) = (x[2] - x[4], x[3] - x[5]);
        let model_torque = u_r + self.injection.torque(e, e_dot, e_hat, e_hat_dot);
        let r = ReferenceSignals { theta_r: x[4], omega_r: x[5], u_r };
        (tracking_control(e_hat, e_hat_dot, r, self.plant, self.reference, self.gains), model_torque)
    }
}

impl System for TrackingLoop<'_> {
    fn dim(&self) -> usize {
        6
    }

    fn state_names(&self) -> Vec<String> {
        ["theta_r", "omega_r", "theta", "omega", "theta_hat", "omega_hat"].map(String::from).to_vec()
    }

    fn derivative(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        let u_r = self.u_r.eval(t).expect("input validated on the grid");
        let (u, model_torque) = self.control(x, u_r);
        let exo = pendulum_dynamics(PendulumState::new(x[0], x[1]), u_r, self.reference);
        let plant = pendulum_dynamics(PendulumState::new(x[2], x[3]), u, self.plant);
        let model = pendulum_dynamics(PendulumState::new(x[4], x[5]), model_torque, self.reference);
        dx[..2].copy_from_slice(&exo);
        dx[2..4].copy_from_slice(&plant);
        dx[4..].copy_from_slice(&model);
    }

    fn output_names(&self) -> Vec<String> {
        ["e", "u"].map(String::from).to_vec()
    }

    fn outputs(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let u_r = self.u_r.eval(t).expect("input validated on the grid");
        out[0] = x[2] - x[0];
        out[1] = self.control(x, u_r).0;
    }
}

/// Checks that a signal is defined on every grid point and half step.
pub(crate) fn check_signal(name: &str, s: &SignalSpec, grid: &TimeGrid) -> Result<(), ExperimentError> {
    let s = s.prepare(grid.t0, grid.t_end).map_err(|e| ExperimentError::Config(format!("{name}: {e}")))?;
    for k in 0..grid.len() {
        let t = grid.time(k);
        s.eval(t).and_then(|_| s.eval(t + 0.5 * grid.dt)).map_err(|e| ExperimentError::Config(format!("{name}: {e}")))?;
    }
    Ok(())
}

/// Largest absolute value of a column on `[a, b)`.
pub fn window_max_abs(traj: &Trajectory, column: &str, a: f64, b: f64) -> f64 {
    let values = traj.column(column).expect("column recorded");
    traj.grid
        .times()
        .zip(values)
        .filter(|(t, _)| *t >= a - 1e-9 && *t < b - 1e-9)
        .fold(0.0, |m, (_, v)| m.max(v.abs()))
}

impl Params {
    fn schedule(&self) -> ResetSchedule {
        ResetSchedule::new(
            self.resets
                .iter()
                .map(|r| {
                    let mut assign: Vec<(usize, f64)> = r.theta.map(|th| (0, th)).into_iter().collect();
                    assign.push((1, r.omega));
                    Reset { time: r.time, assign }
                })
                .collect(),
        )
    }

    pub fn simulate_condition(&self, injection: ErrorInjection) -> Result<Trajectory, ExperimentError> {
        let grid = self.grid.grid()?;
        let u_r = self.u_r.prepare(grid.t0, grid.t_end)?;
        let mut sys = TrackingLoop {
            plant: &self.plant,
            reference: &self.reference,
            gains: &self.gains,
            injection,
            u_r: &u_r,
        };
        let x0 = [
            self.exo_initial[0],
            self.exo_initial[1],
            self.plant_initial[0],
            self.plant_initial[1],
            self.model_initial[0],
            self.model_initial[1],
        ];
        Ok(integrate_sampled(&mut sys, &x0, &grid, &self.schedule(), 1)?)
    }
}

impl Experiment for Params {
    const ID: &'static str = "pendulum-tracking";

    fn grid_mut(&mut self) -> &mut GridParams {
        &mut self.grid
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        self.plant.validate()?;
        self.reference.validate()?;
        self.gains.validate(&self.plant)?;
        check_signal("u_r", &self.u_r, &self.grid.grid()?)?;
        if !(self.tolerance > 0.0) || self.windows.iter().any(|w| !(w[1] > w[0])) {
            return Err(ExperimentError::Config("tracking windows must be nonempty and tolerance positive".into()));
        }
        Ok(())
    }

    fn run(&self, _seed: u64) -> Result<Outcome, ExperimentError> {
        let mut out = Outcome::default();
        for (label, injection) in [("feedback", self.injection), ("open", ErrorInjection::disabled())] {
            let traj = self.simulate_condition(injection)?;
            let mut all_pass = true;
            for w in &self.windows {
                let m = window_max_abs(&traj, "e", w[0], w[1]);
                all_pass &= m < self.tolerance;
                out.set(format!("{label}.max_abs_e.{}_{}", w[0], w[1]), m);
            }
            out.flag(format!("{label}.all_windows_pass"), all_pass);
            out.trajectories.push((label.to_string(), traj.decimate(self.grid.record_stride)?));
        }
        Ok(out)
    }
}
