//! Forced pendulum entrainment and velocity-coupled pendula.
//!
//! Events are forward passages through the bottom position, i.e. up-crossings
//! of `sin θ` through zero. They are defined for small oscillations and for
//! rotations alike.

use serde::{Deserialize, Serialize};

use super::tracking::check_signal;
use super::{Experiment, ExperimentError, GridParams, Outcome};
use crate::controllers::velocity_coupling;
use crate::events::{detect_events, phase_offset, Direction, EventError, EventTrain};
use crate::models::{pendulum_dynamics, PendulumParams, PendulumState};
use crate::sim::{integrate_sampled, Piece, ResetSchedule, Signal, SignalSpec, System, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub grid: GridParams,
    pub pendula: [PendulumParams; 2],
    /// Velocity coupling gain `k`.
    pub coupling: f64,
    pub drive: SignalSpec,
    pub initial: [[f64; 2]; 2],
    /// Minimum spacing of bottom-passage events.
    pub refractory: f64,
    /// Windows `[start, end)` where the pair should be phase locked.
    pub locked_windows: Vec<[f64; 2]>,
    /// Windows `[start, end)` where locking should be lost.
    pub unlocked_windows: Vec<[f64; 2]>,
    pub lock_tolerance: f64,
    pub unlock_threshold: f64,
}

impl Default for Params {
    fn default() -> Self {
        let sine = SignalSpec::sinusoid(0.0, 1.0, 1.0, 0.0);
        Params {
            grid: GridParams::new(100.0, 10),
            pendula: [PendulumParams { a: 1.0, c: 0.5 }, PendulumParams { a: 1.0, c: 0.7 }],
            coupling: 0.5,
            drive: SignalSpec::Piecewise {
                pieces: vec![
                    Piece { start: 0.0, end: Some(33.0), signal: sine.clone() },
                    Piece { start: 33.0, end: Some(66.0), signal: SignalSpec::constant(1.5) },
                    Piece { start: 66.0, end: None, signal: sine },
                ],
            },
            initial: [[0.5, 0.0], [-0.5, 0.0]],
            refractory: 1.0,
            locked_windows: vec![[10.0, 33.0], [80.0, 100.0]],
            unlocked_windows: vec![[33.0, 66.0]],
            lock_tolerance: 0.05,
            unlock_threshold: 0.1,
        }
    }
}

/// `n` pendula under a common drive with all-to-all velocity coupling.
pub struct CoupledPendula<'a> {
    pub pendula: &'a [PendulumParams],
    pub coupling: f64,
    pub drive: &'a Signal,
}

impl System for CoupledPendula<'_> {
    fn dim(&self) -> usize {
        2 * self.pendula.len()
    }

    fn state_names(&self) -> Vec<String> {
        (1..=self.pendula.len()).flat_map(|i| [format!("theta{i}"), format!("omega{i}")]).collect()
    }

    fn derivative(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        let u = self.drive.eval(t).expect("drive validated on the grid");
        for (i, p) in self.pendula.iter().enumerate() {
            let mut ui = u;
            for j in 0..self.pendula.len() {
                if j != i {
                    ui += velocity_coupling(x[2 * i + 1], x[2 * j + 1], self.coupling);
                }
            }
            let d = pendulum_dynamics(PendulumState::new(x[2 * i], x[2 * i + 1]), ui, p);
            dx[2 * i] = d[0];
            dx[2 * i + 1] = d[1];
        }
    }

    fn output_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.pendula.len()).map(|i| format!("s{i}")).collect();
        names.push("u".into());
        names
    }

    fn outputs(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let n = self.pendula.len();
        for i in 0..n {
            out[i] = x[2 * i].sin();
        }
        out[n] = self.drive.eval(t).expect("drive validated on the grid");
    }
}

/// Phase offset restricted to a window; aperiodic or sparse windows yield `None`.
pub fn window_offset(a: &EventTrain, b: &EventTrain, w: [f64; 2]) -> Result<Option<f64>, ExperimentError> {
    match phase_offset(&a.window(w[0], w[1]), &b.window(w[0], w[1])) {
        Ok(x) => Ok(Some(x)),
        Err(EventError::Metric(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

impl Params {
    fn simulate(&self, pendula: &[PendulumParams], coupling: f64, x0: &[f64]) -> Result<Trajectory, ExperimentError> {
        let grid = self.grid.grid()?;
        let drive = self.drive.prepare(grid.t0, grid.t_end)?;
        let mut sys = CoupledPendula { pendula, coupling, drive: &drive };
        Ok(integrate_sampled(&mut sys, x0, &grid, &ResetSchedule::none(), 1)?)
    }

    fn events(&self, traj: &Trajectory, column: &str, trial: usize) -> Result<EventTrain, ExperimentError> {
        Ok(detect_events(traj, column, 0.0, Direction::Up, self.refractory)?.relabel(trial, column))
    }

    fn window_key(w: [f64; 2]) -> String {
        format!("{}_{}", w[0], w[1])
    }
}

impl Experiment for Params {
    const ID: &'static str = "pendulum-entrainment";

    fn grid_mut(&mut self) -> &mut GridParams {
        &mut self.grid
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        for p in &self.pendula {
            p.validate()?;
        }
        check_signal("drive", &self.drive, &self.grid.grid()?)?;
        if !(self.refractory >= 0.0) {
            return Err(ExperimentError::Config("refractory must be >= 0".into()));
        }
        Ok(())
    }

    fn run(&self, _seed: u64) -> Result<Outcome, ExperimentError> {
        let mut out = Outcome::default();

        // single pendulum against its drive
        let single = self.simulate(&self.pendula[..1], 0.0, &self.initial[0])?;
        let s = self.events(&single, "s1", 0)?;
        let drive = self.events(&single, "u", 0)?;
        for &w in &self.locked_windows {
            if let Some(x) = window_offset(&s, &drive, w)? {
                out.set(format!("single.offset_to_drive.{}", Self::window_key(w)), x);
            }
        }
        out.trajectories.push(("single".into(), single.decimate(self.grid.record_stride)?));

        let x0 = [self.initial[0][0], self.initial[0][1], self.initial[1][0], self.initial[1][1]];
        let pair = self.simulate(&self.pendula, self.coupling, &x0)?;
        let e1 = self.events(&pair, "s1", 1)?;
        let e2 = self.events(&pair, "s2", 2)?;
        let mut locked = true;
        for &w in &self.locked_windows {
            let off = window_offset(&e2, &e1, w)?;
            locked &= off.is_some_and(|x| x.abs() < self.lock_tolerance);
            if let Some(x) = off {
                out.set(format!("pair.abs_offset.{}", Self::window_key(w)), x.abs());
            }
            out.flag(format!("pair.periodic.{}", Self::window_key(w)), off.is_some());
        }
        let mut unlocked = true;
        for &w in &self.unlocked_windows {
            let off = window_offset(&e2, &e1, w)?;
            unlocked &= off.is_none_or(|x| x.abs() > self.unlock_threshold);
            if let Some(x) = off {
                out.set(format!("pair.abs_offset.{}", Self::window_key(w)), x.abs());
            }
            out.flag(format!("pair.periodic.{}", Self::window_key(w)), off.is_some());
        }
        out.flag("pair.locked_in_small_regime", locked);
        out.flag("pair.unlocked_in_large_regime", unlocked);
        out.events = vec![s.relabel(0, "single"), e1, e2];
        out.trajectories.push(("pair".into(), pair.decimate(self.grid.record_stride)?));
        Ok(out)
    }
}
