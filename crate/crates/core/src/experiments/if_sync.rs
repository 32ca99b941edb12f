//! Pulse-coupled integrate-and-fire synchrony.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Experiment, ExperimentError, GridParams, Outcome};
use crate::events::{format_sig9, EventTrain};
use crate::models::{IfNetwork, IfUnit};
use crate::sim::{Column, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub n: usize,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Horizon and sampling of the recorded example run.
    pub grid: GridParams,
    pub unit: IfUnit,
    pub sweep: Vec<SweepPoint>,
    /// Random initial conditions per sweep point.
    pub seeds: usize,
    /// Synchrony must occur within this many uncoupled periods.
    pub max_periods: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            grid: GridParams::new(40.0, 10),
            unit: IfUnit { drive: 1.0, leak: 0.5 },
            sweep: vec![
                SweepPoint { n: 10, epsilon: 0.05 },
                SweepPoint { n: 10, epsilon: 0.0 },
                SweepPoint { n: 5, epsilon: 0.05 },
                SweepPoint { n: 20, epsilon: 0.05 },
                SweepPoint { n: 10, epsilon: 0.1 },
            ],
            seeds: 100,
            max_periods: 50.0,
        }
    }
}

/// Uniform initial states for one network draw.
pub fn initial_states(seed: u64, stream: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..n).map(|_| rng.random::<f64>()).collect()
}

/// Time of the first avalanche containing every unit, if it occurs within `horizon`.
pub fn time_to_synchrony(mut net: IfNetwork, horizon: f64) -> Option<f64> {
    let n = net.len();
    net.step(horizon).into_iter().find(|a| a.units.len() == n).map(|a| a.time)
}

impl Params {
    fn point_key(p: &SweepPoint) -> String {
        format!("n{}_eps{}", p.n, format_sig9(p.epsilon))
    }

    fn network(&self, p: &SweepPoint, x: Vec<f64>) -> Result<IfNetwork, ExperimentError> {
        Ok(IfNetwork::identical(p.n, self.unit, p.epsilon, x)?)
    }

    fn recorded_run(&self, seed: u64) -> Result<(Trajectory, Vec<EventTrain>), ExperimentError> {
        let p = self.sweep.first().ok_or_else(|| ExperimentError::Config("sweep is empty".into()))?;
        let mut net = self.network(p, initial_states(seed, 0, p.n))?;
        let grid = self.grid.grid()?;
        let stride = self.grid.record_stride;
        let rec = grid.decimated(stride)?;
        let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(rec.len()); p.n];
        let mut fires: Vec<Vec<f64>> = vec![Vec::new(); p.n];
        for (c, x) in cols.iter_mut().zip(&net.x) {
            c.push(*x);
        }
        for k in 0..grid.steps() {
            for a in net.step(grid.dt) {
                for i in a.units {
                    fires[i].push(a.time);
                }
            }
            if (k + 1) % stride == 0 {
                for (c, x) in cols.iter_mut().zip(&net.x) {
                    c.push(*x);
                }
            }
        }
        let columns = cols.into_iter().enumerate().map(|(i, values)| Column { name: format!("x{i}"), values }).collect();
        let trains = fires.into_iter().enumerate().map(|(i, times)| EventTrain { trial_id: i, label: "fire".into(), times }).collect();
        Ok((Trajectory::new(rec, columns)?, trains))
    }
}

impl Experiment for Params {
    const ID: &'static str = "if-sync";

    fn grid_mut(&mut self) -> &mut GridParams {
        &mut self.grid
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if self.sweep.is_empty() || self.seeds == 0 || !(self.max_periods > 0.0) {
            return Err(ExperimentError::Config("if-sync needs a nonempty sweep, seeds >= 1 and max_periods > 0".into()));
        }
        for p in &self.sweep {
            if p.n < 2 {
                return Err(ExperimentError::Config(format!("sweep point needs n >= 2, got {}", p.n)));
            }
            self.network(p, vec![0.0; p.n])?;
        }
        Ok(())
    }

    fn run(&self, seed: u64) -> Result<Outcome, ExperimentError> {
        let mut out = Outcome::default();
        let period = self.unit.period();
        let horizon = self.max_periods * period;
        out.set("period", period);
        for (pi, p) in self.sweep.iter().enumerate() {
            let times: Vec<Option<f64>> = (0..self.seeds)
                .into_par_iter()
                .map(|s| {
                    let stream = ((pi as u64) << 32) | s as u64;
                    let net = self.network(p, initial_states(seed, stream, p.n))?;
                    Ok(time_to_synchrony(net, horizon))
                })
                .collect::<Result<_, ExperimentError>>()?;
            let synced: Vec<f64> = times.iter().flatten().map(|t| t / period).collect();
            let key = Self::point_key(p);
            out.set(format!("{key}.synced"), synced.len() as f64);
            out.set(format!("{key}.sync_fraction"), synced.len() as f64 / self.seeds as f64);
            if !synced.is_empty() {
                let mut sorted = synced.clone();
                sorted.sort_by(f64::total_cmp);
                out.set(format!("{key}.median_periods_to_sync"), sorted[sorted.len() / 2]);
                out.set(format!("{key}.max_periods_to_sync"), sorted[sorted.len() - 1]);
            }
        }
        let (traj, trains) = self.recorded_run(seed)?;
        out.trajectories.push(("states".into(), traj));
        out.events = trains;
        Ok(out)
    }
}
