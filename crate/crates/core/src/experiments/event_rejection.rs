//! Event rejection with an uncertain internal model of the disturbing synapse.
//!
//! Presynaptic and controlled neurons receive independent frozen noise. The
//! internal-model synapse has every parameter scaled by `1 + δ`; spikes of the
//! compensated neuron are compared with the disturbance-free baseline.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fn_common::{derived_seed, SpikeDetection};
use super::rejection::{column_distance, spike_synapse, CircuitParams, CircuitSpikes, NoiseStats};
use super::tracking::check_signal;
use super::{Experiment, ExperimentError, GridParams, Outcome};
use crate::controllers::{uncertain_synapse, MismatchSpec};
use crate::events::{match_trains, spurious_count};
use crate::models::SynapseParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub grid: GridParams,
    pub circuit: CircuitParams,
    pub drive: NoiseStats,
    pub presynaptic_drive: NoiseStats,
    pub deltas: Vec<f64>,
    pub spikes: SpikeDetection,
    /// Events closer than this are the same event.
    pub match_window: f64,
    /// Time after which voltages are compared.
    pub transient: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            grid: GridParams::new(1000.0, 50),
            circuit: CircuitParams {
                control_on: 0.0,
                synapse: SynapseParams { g: 1.0, ..spike_synapse() },
                ..CircuitParams::default()
            },
            drive: NoiseStats { mean: -2.0, std: 6.0, hold: 5.0 },
            presynaptic_drive: NoiseStats { mean: 0.0, std: 1.5, hold: 5.0 },
            deltas: vec![0.0, 0.05, 0.1, 0.2],
            spikes: SpikeDetection::default(),
            match_window: 1.0,
            transient: 50.0,
        }
    }
}

const PLANT_NOISE: u64 = 21;
const PRESYNAPTIC_NOISE: u64 = 22;

impl Experiment for Params {
    const ID: &'static str = "event-rejection";

    fn grid_mut(&mut self) -> &mut GridParams {
        &mut self.grid
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        self.circuit.validate()?;
        let grid = self.grid.grid()?;
        check_signal("drive", &self.drive.spec(0), &grid)?;
        check_signal("presynaptic_drive", &self.presynaptic_drive.spec(0), &grid)?;
        if self.deltas.is_empty() {
            return Err(ExperimentError::Config("deltas must not be empty".into()));
        }
        for &delta in &self.deltas {
            uncertain_synapse(&self.circuit.synapse, MismatchSpec { delta })?;
        }
        if !(self.match_window > 0.0) {
            return Err(ExperimentError::Config("match_window must be > 0".into()));
        }
        Ok(())
    }

    fn run(&self, seed: u64) -> Result<Outcome, ExperimentError> {
        let mut out = Outcome::default();
        let c = &self.circuit;
        let drive = self.drive.spec(derived_seed(seed, PLANT_NOISE, 0));
        let pre = self.presynaptic_drive.spec(derived_seed(seed, PRESYNAPTIC_NOISE, 0));
        let runs = self
            .deltas
            .par_iter()
            .map(|&delta| {
                let model = uncertain_synapse(&c.synapse, MismatchSpec { delta })?;
                let traj = c.simulate(&model, &drive, &pre, &self.grid)?;
                let spikes = CircuitSpikes::detect(&traj, &self.spikes)?;
                Ok((delta, traj, spikes))
            })
            .collect::<Result<Vec<_>, ExperimentError>>()?;

        let mut all_pass = true;
        for (k, (delta, traj, spikes)) in runs.into_iter().enumerate() {
            let key = format!("delta_{delta}");
            let rep = match_trains(&spikes.unperturbed, &spikes.compensated, self.match_window);
            let spurious = spurious_count(&spikes.unperturbed, &spikes.compensated, self.match_window);
            let (max, rms) = column_distance(&traj, "v_u", "v_c", self.transient);
            out.set(format!("{key}.spurious_count"), spurious as f64);
            out.set(format!("{key}.matched_fraction"), rep.matched_fraction);
            out.set(format!("{key}.max_abs_dv"), max);
            out.set(format!("{key}.rms_dv"), rms);
            all_pass &= spurious == 0 && rep.matched_fraction == 1.0 && (delta == 0.0 || rms > 1e-3);
            if k == 0 {
                out.set(
                    "perturbed.spurious_count",
                    spurious_count(&spikes.unperturbed, &spikes.perturbed, self.match_window) as f64,
                );
                out.set("presynaptic.spikes", spikes.presynaptic.len() as f64);
                out.set("baseline.spikes", spikes.unperturbed.len() as f64);
                out.events.extend([spikes.presynaptic.clone(), spikes.unperturbed.clone(), spikes.perturbed.clone()]);
            }
            out.events.push(spikes.compensated.relabel(4 + k, key.clone()));
            out.trajectories.push((key, traj.decimate(self.grid.record_stride)?));
        }
        out.flag("all_deltas_reject_events", all_pass);
        Ok(out)
    }
}
