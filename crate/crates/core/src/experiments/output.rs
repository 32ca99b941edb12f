use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{ExperimentError, ExperimentSpec};
use crate::events::{format_sig9, write_events_csv, EventTrain};
use crate::sim::Trajectory;

/// In-memory products of one experiment run.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub trajectories: Vec<(String, Trajectory)>,
    pub events: Vec<EventTrain>,
    pub metrics: BTreeMap<String, f64>,
}

impl Outcome {
    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    pub fn trajectory(&self, name: &str) -> Option<&Trajectory> {
        self.trajectories.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    /// Event trains with the given label, in trial order.
    pub fn trains(&self, label: &str) -> Vec<&EventTrain> {
        self.events.iter().filter(|t| t.label == label).collect()
    }

    pub(crate) fn set(&mut self, key: impl Into<String>, value: f64) {
        self.metrics.insert(key.into(), value);
    }

    pub(crate) fn flag(&mut self, key: impl Into<String>, value: bool) {
        self.set(key, if value { 1.0 } else { 0.0 });
    }
}

/// Everything needed to regenerate a result set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub artifact: String,
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    /// Fully resolved parameters, including presets and defaults.
    pub params: Value,
    /// The request as given, minus the output directory.
    pub spec: ExperimentSpec,
}

impl Manifest {
    /// A spec that pins every resolved parameter, so rerunning it reproduces
    /// this result set regardless of later default changes.
    pub fn to_spec(&self) -> ExperimentSpec {
        ExperimentSpec {
            experiment: self.experiment.clone(),
            seed: Some(self.seed),
            overrides: super::config::flatten(&self.params),
            grid: Default::default(),
            out_dir: None,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| ExperimentError::Config(format!("manifest {}: {e}", path.display())))
    }
}

/// Paths and metrics of a persisted run.
#[derive(Debug, Clone)]
pub struct ResultSet {
    pub dir: PathBuf,
    pub trajectories: Vec<PathBuf>,
    pub events: PathBuf,
    pub metrics_path: PathBuf,
    pub manifest_path: PathBuf,
    pub metrics: BTreeMap<String, f64>,
    pub manifest: Manifest,
}

pub fn write_trajectory_csv<W: Write>(out: W, traj: &Trajectory) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend(traj.names().map(str::to_string));
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for (k, t) in traj.times().into_iter().enumerate() {
        row.clear();
        row.push(format_sig9(t));
        row.extend(traj.columns.iter().map(|c| format_sig9(c.values[k])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn prepare_dir(dir: &Path, force: bool) -> Result<(), ExperimentError> {
    if dir.exists() {
        let occupied = fs::read_dir(dir)?.next().is_some();
        if occupied && !force {
            return Err(ExperimentError::OutputExists(dir.to_path_buf()));
        }
    }
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ExperimentError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| ExperimentError::Runtime(e.to_string()))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub(crate) fn persist(
    dir: &Path,
    force: bool,
    manifest: Manifest,
    outcome: Outcome,
) -> Result<ResultSet, ExperimentError> {
    prepare_dir(dir, force)?;
    let mut trajectories = Vec::new();
    for (name, traj) in &outcome.trajectories {
        let path = dir.join(format!("{name}.csv"));
        write_trajectory_csv(BufWriter::new(File::create(&path)?), traj)?;
        trajectories.push(path);
    }
    let events = dir.join("events.csv");
    write_events_csv(BufWriter::new(File::create(&events)?), &outcome.events)?;
    let metrics_path = dir.join("metrics.json");
    write_json(&metrics_path, &outcome.metrics)?;
    let manifest_path = dir.join("manifest.json");
    write_json(&manifest_path, &manifest)?;
    Ok(ResultSet { dir: dir.to_path_buf(), trajectories, events, metrics_path, manifest_path, metrics: outcome.metrics, manifest })
}
