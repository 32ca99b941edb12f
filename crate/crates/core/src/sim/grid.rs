use serde::{Deserialize, Serialize};

use super::SimError;

/// Relative tolerance used to decide whether a horizon is a whole number of steps.
const GRID_REL_TOL: f64 = 1e-9;

/// Uniform time grid `t0, t0 + dt, ..., t_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl TimeGrid {
    pub fn new(t0: f64, t_end: f64, dt: f64) -> Result<Self, SimError> {
        let grid = TimeGrid { t0, t_end, dt };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid starting at zero.
    pub fn span(t_end: f64, dt: f64) -> Result<Self, SimError> {
        Self::new(0.0, t_end, dt)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(SimError::InvalidGrid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > self.t0) || !self.t0.is_finite() || !self.t_end.is_finite() {
            return Err(SimError::InvalidGrid(format!(
                "t_end ({}) must exceed t0 ({})",
                self.t_end, self.t0
            )));
        }
        let ratio = (self.t_end - self.t0) / self.dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > GRID_REL_TOL * ratio.max(1.0) {
            return Err(SimError::InvalidGrid(format!(
                "horizon {} is not a whole number of steps of {}",
                self.t_end - self.t0,
                self.dt
            )));
        }
        Ok(())
    }

    /// Number of integration steps.
    pub fn steps(&self) -> usize {
        ((self.t_end - self.t0) / self.dt).round() as usize
    }

    /// Number of samples (steps + 1).
    pub fn len(&self) -> usize {
        self.steps() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Time of sample `k`.
    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// Index of the grid point nearest to `t`, or `None` outside the grid.
    pub fn nearest_index(&self, t: f64) -> Option<usize> {
        let k = ((t - self.t0) / self.dt).round();
        if k < 0.0 || k > self.steps() as f64 {
            None
        } else {
            Some(k as usize)
        }
    }

    /// Coarser grid that keeps every `stride`-th sample.
    pub fn decimated(&self, stride: usize) -> Result<Self, SimError> {
        let stride = stride.max(1);
        if !self.steps().is_multiple_of(stride) {
            return Err(SimError::InvalidGrid(format!(
                "stride {stride} does not divide {} steps",
                self.steps()
            )));
        }
        Ok(TimeGrid { t0: self.t0, t_end: self.t_end, dt: self.dt * stride as f64 })
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.time(k))
    }
}
