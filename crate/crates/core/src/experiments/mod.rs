//! Declarative experiment catalog.
//!
//! Each catalog entry owns a parameter record with serde defaults. A run
//! resolves the defaults, applies dotted-path overrides from the request,
//! simulates (trials in parallel, merged in trial order) and persists
//! trajectory CSVs, an event CSV, a metrics map and a manifest.

mod config;
mod fn_common;
mod output;

pub mod coupling;
pub mod entrainment;
pub mod event_pendulum;
pub mod event_rejection;
pub mod if_sync;
pub mod rejection;
pub mod reliability;
pub mod tracking;

pub use config::{apply_override, flatten, ExperimentSpec, GridOverride};
pub use fn_common::{derived_seed, driven_spikes, DrivenFn, InitialBox, SpikeDetection};
pub use output::{write_trajectory_csv, Manifest, Outcome, ResultSet};

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controllers::ControlError;
use crate::events::EventError;
use crate::models::ModelError;
use crate::sim::{SimError, TimeGrid};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("unknown experiment {0:?}")]
    UnknownExperiment(String),
    #[error("override path {0:?} does not name a parameter")]
    UnknownOverride(String),
    #[error("config: {0}")]
    Config(String),
    #[error("output directory {} is not empty (use force to overwrite)", .0.display())]
    OutputExists(PathBuf),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Event(#[from] EventError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Runtime(String),
}

impl ExperimentError {
    /// Errors detectable before any simulation starts.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            ExperimentError::UnknownExperiment(_)
                | ExperimentError::UnknownOverride(_)
                | ExperimentError::Config(_)
                | ExperimentError::OutputExists(_)
                | ExperimentError::Model(_)
                | ExperimentError::Control(_)
        )
    }
}

/// Grid settings carried by every parameter record under the key `grid`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub dt: f64,
    pub t_end: f64,
    /// Keep every `record_stride`-th sample in trajectory files.
    pub record_stride: usize,
}

impl GridParams {
    pub fn new(t_end: f64, record_stride: usize) -> Self {
        GridParams { dt: crate::sim::DEFAULT_DT, t_end, record_stride }
    }

    pub fn grid(&self) -> Result<TimeGrid, ExperimentError> {
        if self.record_stride == 0 {
            return Err(ExperimentError::Config("grid.record_stride must be at least 1".into()));
        }
        TimeGrid::span(self.t_end, self.dt).map_err(|e| ExperimentError::Config(e.to_string()))
    }
}

/// A catalog entry's parameter record and simulation.
pub trait Experiment: Serialize + DeserializeOwned + Default {
    const ID: &'static str;

    fn grid_mut(&mut self) -> &mut GridParams;

    /// Checks parameter consistency without simulating.
    fn validate(&self) -> Result<(), ExperimentError>;

    fn run(&self, seed: u64) -> Result<Outcome, ExperimentError>;
}

pub struct CatalogEntry {
    pub id: &'static str,
    pub figure: &'static str,
    pub description: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        id: reliability::Params::ID,
        figure: "fig1",
        description: "FN neuron over 25 trials: constant step versus shared frozen noise",
    },
    CatalogEntry {
        id: tracking::Params::ID,
        figure: "fig3",
        description: "pendulum tracking of a bistable exosystem with an internal model",
    },
    CatalogEntry {
        id: rejection::DcParams::ID,
        figure: "fig5",
        description: "synaptic disturbance rejection under constant drive, residual phase shift",
    },
    CatalogEntry {
        id: rejection::NoiseParams::ID,
        figure: "fig6",
        description: "synaptic disturbance rejection under frozen-noise drive",
    },
    CatalogEntry {
        id: entrainment::Params::ID,
        figure: "fig7",
        description: "forced and velocity-coupled pendula, locking lost under constant torque",
    },
    CatalogEntry {
        id: coupling::Params::ID,
        figure: "fig8",
        description: "heterogeneous FN pair: diffusive versus synaptic versus no coupling",
    },
    CatalogEntry {
        id: event_rejection::Params::ID,
        figure: "fig10",
        description: "event rejection with an uncertain inhibitory internal model, mismatch sweep",
    },
    CatalogEntry {
        id: if_sync::Params::ID,
        figure: "ifsync",
        description: "pulse-coupled integrate-and-fire synchrony over sizes, couplings and seeds",
    },
    CatalogEntry {
        id: event_pendulum::Params::ID,
        figure: "fig12",
        description: "HCO-driven pendulum with event phase control, inhibitory to excitatory switch",
    },
];

/// Catalog id for a figure id accepted by `reproduce`.
pub fn figure_experiment(figure: &str) -> Option<&'static str> {
    CATALOG.iter().find(|e| e.figure == figure).map(|e| e.id)
}

pub const DEFAULT_SEED: u64 = 1;

fn resolve<E: Experiment>(spec: &ExperimentSpec) -> Result<E, ExperimentError> {
    let mut doc = serde_json::to_value(E::default()).expect("parameter records serialize");
    for (path, value) in &spec.overrides {
        apply_override(&mut doc, path, value.clone())?;
    }
    let mut params: E = serde_json::from_value(doc).map_err(|e| ExperimentError::Config(e.to_string()))?;
    let g = params.grid_mut();
    if let Some(dt) = spec.grid.dt {
        g.dt = dt;
    }
    if let Some(t_end) = spec.grid.t_end {
        g.t_end = t_end;
    }
    if let Some(stride) = spec.grid.record_stride {
        g.record_stride = stride;
    }
    params.grid_mut().grid()?;
    params.validate()?;
    Ok(params)
}

fn manifest_for<E: Experiment>(spec: &ExperimentSpec, params: &E, seed: u64) -> Manifest {
    Manifest {
        artifact: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: E::ID.to_string(),
        seed,
        params: serde_json::to_value(params).expect("parameter records serialize"),
        spec: ExperimentSpec { out_dir: None, ..spec.clone() },
    }
}

fn prepare<E: Experiment>(spec: &ExperimentSpec, simulate: bool) -> Result<(Manifest, Option<Outcome>), ExperimentError> {
    let params: E = resolve(spec)?;
    let seed = spec.seed.unwrap_or(DEFAULT_SEED);
    let manifest = manifest_for(spec, &params, seed);
    let outcome = if simulate { Some(params.run(seed)?) } else { None };
    Ok((manifest, outcome))
}

fn dispatch(spec: &ExperimentSpec, simulate: bool) -> Result<(Manifest, Option<Outcome>), ExperimentError> {
    match spec.experiment.as_str() {
        reliability::Params::ID => prepare::<reliability::Params>(spec, simulate),
        tracking::Params::ID => prepare::<tracking::Params>(spec, simulate),
        rejection::DcParams::ID => prepare::<rejection::DcParams>(spec, simulate),
        rejection::NoiseParams::ID => prepare::<rejection::NoiseParams>(spec, simulate),
        entrainment::Params::ID => prepare::<entrainment::Params>(spec, simulate),
        coupling::Params::ID => prepare::<coupling::Params>(spec, simulate),
        event_rejection::Params::ID => prepare::<event_rejection::Params>(spec, simulate),
        if_sync::Params::ID => prepare::<if_sync::Params>(spec, simulate),
        event_pendulum::Params::ID => prepare::<event_pendulum::Params>(spec, simulate),
        other => Err(ExperimentError::UnknownExperiment(other.to_string())),
    }
}

/// Resolves a request into its manifest without simulating or writing anything.
pub fn validate_spec(spec: &ExperimentSpec) -> Result<Manifest, ExperimentError> {
    dispatch(spec, false).map(|(m, _)| m)
}

/// Resolves and simulates a request, keeping results in memory.
pub fn simulate(spec: &ExperimentSpec) -> Result<(Manifest, Outcome), ExperimentError> {
    let (manifest, outcome) = dispatch(spec, true)?;
    Ok((manifest, outcome.expect("simulated")))
}

/// Output directory for a request: the spec's `out_dir`, else
/// `$EVENTREG_OUT/<id>`, else `eventreg-out/<id>`.
pub fn output_dir(spec: &ExperimentSpec) -> PathBuf {
    if let Some(dir) = &spec.out_dir {
        return dir.clone();
    }
    let root = std::env::var_os("EVENTREG_OUT").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("eventreg-out"));
    root.join(&spec.experiment)
}

/// Runs a request and writes its result set. An occupied output directory is
/// an error unless `force` is set.
pub fn run_experiment(spec: &ExperimentSpec, force: bool) -> Result<ResultSet, ExperimentError> {
    let dir = output_dir(spec);
    let (manifest, _) = dispatch(spec, false)?;
    if !force && dir.exists() && std::fs::read_dir(&dir)?.next().is_some() {
        return Err(ExperimentError::OutputExists(dir));
    }
    let (manifest_full, outcome) = simulate(spec)?;
    debug_assert_eq!(manifest, manifest_full);
    output::persist(&dir, force, manifest_full, outcome)
}

/// Reruns the request recorded in a manifest into `out_dir`.
pub fn rerun_manifest(manifest: &Path, out_dir: &Path, force: bool) -> Result<ResultSet, ExperimentError> {
    let m = Manifest::from_file(manifest)?;
    let spec = ExperimentSpec { out_dir: Some(out_dir.to_path_buf()), ..m.spec.clone() };
    run_experiment(&spec, force)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_complete_and_unique() {
        assert_eq!(CATALOG.len(), 9);
        for (i, a) in CATALOG.iter().enumerate() {
            for b in &CATALOG[i + 1..] {
                assert_ne!(a.id, b.id);
                assert_ne!(a.figure, b.figure);
            }
        }
        for fig in ["fig1", "fig3", "fig5", "fig6", "fig7", "fig8", "fig10", "fig12", "ifsync"] {
            assert!(figure_experiment(fig).is_some(), "{fig}");
        }
    }

    #[test]
    fn every_entry_resolves_defaults() {
        for e in CATALOG {
            let m = validate_spec(&ExperimentSpec::new(e.id)).unwrap();
            assert_eq!(m.experiment, e.id);
            assert_eq!(m.seed, DEFAULT_SEED);
        }
    }

    #[test]
    fn override_errors_precede_simulation() {
        for e in CATALOG {
            let spec = ExperimentSpec::new(e.id).with_override("no.such.path", serde_json::json!(1));
            assert!(matches!(validate_spec(&spec), Err(ExperimentError::UnknownOverride(_))));
        }
        assert!(matches!(validate_spec(&ExperimentSpec::new("fig99")), Err(ExperimentError::UnknownExperiment(_))));
    }

    #[test]
    fn bad_grid_is_a_config_error() {
        let mut spec = ExperimentSpec::new("if-sync");
        spec.grid.dt = Some(-1.0);
        let err = validate_spec(&spec).unwrap_err();
        assert!(err.is_config_error(), "{err}");
    }
}
