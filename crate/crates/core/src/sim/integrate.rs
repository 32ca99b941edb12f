use serde::{Deserialize, Serialize};

use super::{SimError, TimeGrid};

/// A vector field together with the bookkeeping the integrator needs.
///
/// `derivative` must be pure for a fixed controller state; discrete controller
/// updates happen in [`System::after_step`], which runs once per accepted step.
pub trait System {
    fn dim(&self) -> usize;

    fn state_names(&self) -> Vec<String>;

    fn derivative(&self, t: f64, x: &[f64], dx: &mut [f64]);

    /// Names of extra recorded columns (inputs, outputs).
    fn output_names(&self) -> Vec<String> {
        Vec::new()
    }

    fn outputs(&self, _t: f64, _x: &[f64], _out: &mut [f64]) {}

    fn after_step(&mut self, _t: f64, _x: &[f64]) {}
}

/// Closure-backed system, handy for tests and small scripts.
pub struct VectorField<F> {
    names: Vec<String>,
    field: F,
}

impl<F> VectorField<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    pub fn new(names: &[&str], field: F) -> Self {
        VectorField { names: names.iter().map(|s| s.to_string()).collect(), field }
    }
}

impl<F> System for VectorField<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.names.len()
    }

    fn state_names(&self) -> Vec<String> {
        self.names.clone()
    }

    fn derivative(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        (self.field)(t, x, dx)
    }
}

/// A scheduled state assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reset {
    pub time: f64,
    /// `(state index, value)` pairs; components not listed keep their value.
    pub assign: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResetSchedule {
    pub resets: Vec<Reset>,
}

impl ResetSchedule {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(resets: Vec<Reset>) -> Self {
        ResetSchedule { resets }
    }

    /// Resolves reset times to grid indices, checking ordering and range.
    fn resolve(&self, grid: &TimeGrid, dim: usize) -> Result<Vec<(usize, &Reset)>, SimError> {
        let mut out: Vec<(usize, &Reset)> = Vec::with_capacity(self.resets.len());
        for r in &self.resets {
            if let Some(&(_, prev)) = out.last() {
                if r.time <= prev.time {
                    return Err(SimError::InvalidResets(format!(
                        "reset times must be strictly increasing ({} after {})",
                        r.time, prev.time
                    )));
                }
            }
            let k = grid
                .nearest_index(r.time)
                .filter(|&k| k > 0)
                .ok_or_else(|| SimError::InvalidResets(format!("reset at t={} lies outside the grid", r.time)))?;
            if let Some(&(i, _)) = r.assign.iter().find(|(i, _)| *i >= dim) {
                return Err(SimError::InvalidResets(format!("reset assigns component {i} of a {dim}-state system")));
            }
            out.push((k, r));
        }
        Ok(out)
    }
}

/// Named column of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Dense, time-indexed samples of states and outputs on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub columns: Vec<Column>,
}

impl Trajectory {
    pub fn new(grid: TimeGrid, columns: Vec<Column>) -> Result<Self, SimError> {
        let n = grid.len();
        for c in &columns {
            if c.values.len() != n {
                return Err(SimError::Shape(format!(
                    "column {} has {} samples, grid has {n}",
                    c.name,
                    c.values.len()
                )));
            }
            if let Some(k) = c.values.iter().position(|v| !v.is_finite()) {
                return Err(SimError::Shape(format!("column {} is not finite at sample {k}", c.name)));
            }
        }
        Ok(Trajectory { grid, columns })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid.times().collect()
    }

    /// Final value of every column, in column order.
    pub fn last(&self) -> Vec<f64> {
        self.columns.iter().map(|c| *c.values.last().expect("non-empty column")).collect()
    }

    /// Keeps the named columns (in the given order), renaming them with `prefix`.
    pub fn select(&self, names: &[&str], prefix: &str) -> Result<Vec<Column>, SimError> {
        names
            .iter()
            .map(|n| {
                self.column(n)
                    .map(|v| Column { name: format!("{prefix}{n}"), values: v.to_vec() })
                    .ok_or_else(|| SimError::Shape(format!("no column named {n}")))
            })
            .collect()
    }

    /// Every `stride`-th sample.
    pub fn decimate(&self, stride: usize) -> Result<Trajectory, SimError> {
        let grid = self.grid.decimated(stride)?;
        let stride = stride.max(1);
        let columns = self
            .columns
            .iter()
            .map(|c| Column { name: c.name.clone(), values: c.values.iter().step_by(stride).copied().collect() })
            .collect();
        Ok(Trajectory { grid, columns })
    }
}

/// Classical fourth-order Runge-Kutta stepper with reusable stage buffers.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Rk4 { k1: vec![0.0; dim], k2: vec![0.0; dim], k3: vec![0.0; dim], k4: vec![0.0; dim], tmp: vec![0.0; dim] }
    }

    /// Advances `x` from `t` to `t + h` in place. Returns the first non-finite
    /// stage component, if any.
    pub fn step<S: System + ?Sized>(&mut self, sys: &S, t: f64, h: f64, x: &mut [f64]) -> Result<(), usize> {
        let n = x.len();
        sys.derivative(t, x, &mut self.k1);
        check_finite(&self.k1)?;
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * self.k1[i];
        }
        sys.derivative(t + 0.5 * h, &self.tmp, &mut self.k2);
        check_finite(&self.k2)?;
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * self.k2[i];
        }
        sys.derivative(t + 0.5 * h, &self.tmp, &mut self.k3);
        check_finite(&self.k3)?;
        for i in 0..n {
            self.tmp[i] = x[i] + h * self.k3[i];
        }
        sys.derivative(t + h, &self.tmp, &mut self.k4);
        check_finite(&self.k4)?;
        for i in 0..n {
            x[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
        check_finite(x)
    }
}

#[inline]
fn check_finite(v: &[f64]) -> Result<(), usize> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(i),
        None => Ok(()),
    }
}

/// Integrates `sys` over `grid`, recording every sample.
pub fn integrate<S: System + ?Sized>(
    sys: &mut S,
    x0: &[f64],
    grid: &TimeGrid,
    resets: &ResetSchedule,
) -> Result<Trajectory, SimError> {
    integrate_sampled(sys, x0, grid, resets, 1)
}

/// Integrates `sys` over `grid`, recording every `stride`-th sample. The
/// returned trajectory lives on the decimated grid.
pub fn integrate_sampled<S: System + ?Sized>(
    sys: &mut S,
    x0: &[f64],
    grid: &TimeGrid,
    resets: &ResetSchedule,
    stride: usize,
) -> Result<Trajectory, SimError> {
    grid.validate()?;
    let dim = sys.dim();
    if x0.len() != dim {
        return Err(SimError::Dimension { expected: dim, got: x0.len() });
    }
    let out_grid = grid.decimated(stride)?;
    let stride = stride.max(1);
    let schedule = resets.resolve(grid, dim)?;

    let state_names = sys.state_names();
    let output_names = sys.output_names();
    let n_out = output_names.len();
    let n_samples = out_grid.len();
    let mut columns: Vec<Vec<f64>> = (0..dim + n_out).map(|_| Vec::with_capacity(n_samples)).collect();
    let mut out_buf = vec![0.0; n_out];

    let mut x = x0.to_vec();
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(SimError::NonFinite { step: 0, component: state_names[i].clone() });
    }
    let mut record = |t: f64, x: &[f64], sys: &S, columns: &mut Vec<Vec<f64>>| {
        for (c, v) in columns.iter_mut().zip(x) {
            c.push(*v);
        }
        if n_out > 0 {
            sys.outputs(t, x, &mut out_buf);
            for (c, v) in columns[dim..].iter_mut().zip(&out_buf) {
                c.push(*v);
            }
        }
    };
    record(grid.t0, &x, sys, &mut columns);

    let mut rk = Rk4::new(dim);
    let mut next_reset = schedule.iter().peekable();
    for k in 0..grid.steps() {
        let t = grid.time(k);
        if let Err(i) = rk.step(sys, t, grid.dt, &mut x) {
            return Err(SimError::NonFinite { step: k, component: state_names[i].clone() });
        }
        let t_next = grid.time(k + 1);
        sys.after_step(t_next, &x);
        if let Some(&&(kr, reset)) = next_reset.peek() {
            if kr == k + 1 {
                for &(i, v) in &reset.assign {
                    x[i] = v;
                }
                next_reset.next();
            }
        }
        if (k + 1) % stride == 0 {
            record(t_next, &x, sys, &mut columns);
        }
    }

    let names = state_names.into_iter().chain(output_names);
    let columns = names.zip(columns).map(|(name, values)| Column { name, values }).collect();
    Trajectory::new(out_grid, columns)
}

/// Integrates `sys` over `grid` without storing samples; `observe` sees every
/// grid point (after resets) and the final state is returned.
pub fn integrate_observed<S, F>(
    sys: &mut S,
    x0: &[f64],
    grid: &TimeGrid,
    resets: &ResetSchedule,
    mut observe: F,
) -> Result<Vec<f64>, SimError>
where
    S: System + ?Sized,
    F: FnMut(f64, &[f64]),
{
    grid.validate()?;
    let dim = sys.dim();
    if x0.len() != dim {
        return Err(SimError::Dimension { expected: dim, got: x0.len() });
    }
    let schedule = resets.resolve(grid, dim)?;
    let state_names = sys.state_names();
    let mut x = x0.to_vec();
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(SimError::NonFinite { step: 0, component: state_names[i].clone() });
    }
    observe(grid.t0, &x);
    let mut rk = Rk4::new(dim);
    let mut next_reset = schedule.iter().peekable();
    for k in 0..grid.steps() {
        if let Err(i) = rk.step(sys, grid.time(k), grid.dt, &mut x) {
            return Err(SimError::NonFinite { step: k, component: state_names[i].clone() });
        }
        let t_next = grid.time(k + 1);
        sys.after_step(t_next, &x);
        if let Some(&&(kr, reset)) = next_reset.peek() {
            if kr == k + 1 {
                for &(i, v) in &reset.assign {
                    x[i] = v;
                }
                next_reset.next();
            }
        }
        observe(t_next, &x);
    }
    Ok(x)
}

/// Final state only; no trajectory is stored.
pub fn integrate_final<S: System + ?Sized>(sys: &mut S, x0: &[f64], grid: &TimeGrid) -> Result<Vec<f64>, SimError> {
    grid.validate()?;
    if x0.len() != sys.dim() {
        return Err(SimError::Dimension { expected: sys.dim(), got: x0.len() });
    }
    let mut x = x0.to_vec();
    let mut rk = Rk4::new(x.len());
    for k in 0..grid.steps() {
        if let Err(i) = rk.step(sys, grid.time(k), grid.dt, &mut x) {
            return Err(SimError::NonFinite { step: k, component: sys.state_names()[i].clone() });
        }
        sys.after_step(grid.time(k + 1), &x);
    }
    Ok(x)
}

/// Max-norm terminal errors against `exact_final` at `grid.dt` and `grid.dt / 2`.
pub fn halving_error<S: System + ?Sized>(
    sys: &mut S,
    x0: &[f64],
    grid: &TimeGrid,
    exact_final: &[f64],
) -> Result<(f64, f64), SimError> {
    let fine = TimeGrid::new(grid.t0, grid.t_end, grid.dt / 2.0)?;
    let err = |x: Vec<f64>| x.iter().zip(exact_final).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let coarse_err = err(integrate_final(sys, x0, grid)?);
    let fine_err = err(integrate_final(sys, x0, &fine)?);
    Ok((coarse_err, fine_err))
}
