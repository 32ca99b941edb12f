//! Event extraction and event-level metrics.
//!
//! Events are threshold crossings of a recorded signal. Trains from different
//! trials or conditions are compared by greedy time-ordered matching, by
//! reliability across trials and by circular phase offsets.

mod csv_io;
mod metrics;

pub use csv_io::{format_sig9, read_events_csv, write_events_csv};
pub use metrics::{
    circular_spread, match_trains, phase_offset, reliability, spurious_count, MatchReport, Reliability,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::Trajectory;

#[derive(Debug, Error)]
pub enum EventError {
    #[error("no column named {0:?}")]
    MissingColumn(String),
    #[error("metric precondition violated: {0}")]
    Metric(String),
    #[error("event times must be strictly increasing")]
    Unordered,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed event record: {0}")]
    Parse(String),
}

/// Ordered event times of one trial.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EventTrain {
    pub trial_id: usize,
    pub label: String,
    pub times: Vec<f64>,
}

impl EventTrain {
    pub fn new(trial_id: usize, label: impl Into<String>, times: Vec<f64>) -> Result<Self, EventError> {
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(EventError::Unordered);
        }
        Ok(EventTrain { trial_id, label: label.into(), times })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Events with `from <= t < to`.
    pub fn window(&self, from: f64, to: f64) -> EventTrain {
        EventTrain {
            trial_id: self.trial_id,
            label: self.label.clone(),
            times: self.times.iter().copied().filter(|&t| t >= from && t < to).collect(),
        }
    }

    pub fn intervals(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn mean_interval(&self) -> Option<f64> {
        if self.times.len() < 2 {
            return None;
        }
        Some((self.times[self.times.len() - 1] - self.times[0]) / (self.times.len() - 1) as f64)
    }

    /// Relative standard deviation of the inter-event intervals.
    pub fn interval_cv(&self) -> Option<f64> {
        let isi = self.intervals();
        if isi.len() < 2 {
            return None;
        }
        let (mean, std) = mean_std(&isi);
        Some(std / mean)
    }

    pub fn relabel(mut self, trial_id: usize, label: impl Into<String>) -> Self {
        self.trial_id = trial_id;
        self.label = label.into();
        self
    }
}

/// Crossing direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

/// Threshold-crossing detector settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detector {
    pub threshold: f64,
    pub direction: Direction,
    pub refractory: f64,
}

impl Detector {
    pub fn up(threshold: f64, refractory: f64) -> Self {
        Detector { threshold, direction: Direction::Up, refractory }
    }

    pub fn down(threshold: f64, refractory: f64) -> Self {
        Detector { threshold, direction: Direction::Down, refractory }
    }

    /// Crossing times in a uniformly sampled signal starting at `t0`.
    pub fn detect(&self, t0: f64, dt: f64, values: &[f64]) -> Vec<f64> {
        let th = self.threshold;
        let mut out: Vec<f64> = Vec::new();
        for (k, w) in values.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let crossed = match self.direction {
                Direction::Up => a <= th && b > th,
                Direction::Down => a >= th && b < th,
            };
            if !crossed {
                continue;
            }
            let t = t0 + (k as f64 + (th - a) / (b - a)) * dt;
            if out.last().is_none_or(|&last| t - last >= self.refractory) {
                out.push(t);
            }
        }
        out
    }
}

/// Online threshold-crossing detector for closed loops that react to events
/// while the simulation runs.
#[derive(Debug, Clone, PartialEq)]
pub struct OnlineDetector {
    pub detector: Detector,
    prev: Option<(f64, f64)>,
    last: f64,
}

impl OnlineDetector {
    pub fn new(detector: Detector) -> Self {
        OnlineDetector { detector, prev: None, last: f64::NEG_INFINITY }
    }

    /// Feeds one sample; returns the interpolated crossing time when an event fires.
    pub fn push(&mut self, t: f64, value: f64) -> Option<f64> {
        let prev = self.prev.replace((t, value));
        let (t_a, a) = prev?;
        let th = self.detector.threshold;
        let crossed = match self.detector.direction {
            Direction::Up => a <= th && value > th,
            Direction::Down => a >= th && value < th,
        };
        if !crossed {
            return None;
        }
        let te = t_a + (th - a) / (value - a) * (t - t_a);
        if te - self.last >= self.detector.refractory {
            self.last = te;
            Some(te)
        } else {
            None
        }
    }
}

/// Threshold crossings of one trajectory column, linearly interpolated between samples.
/// Crossings closer than `refractory` to the previous accepted event are dropped.
pub fn detect_events(
    traj: &Trajectory,
    column: &str,
    threshold: f64,
    direction: Direction,
    refractory: f64,
) -> Result<EventTrain, EventError> {
    let values = traj.column(column).ok_or_else(|| EventError::MissingColumn(column.to_string()))?;
    let det = Detector { threshold, direction, refractory };
    Ok(EventTrain { trial_id: 0, label: column.to_string(), times: det.detect(traj.grid.t0, traj.grid.dt, values) })
}

pub(crate) fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
