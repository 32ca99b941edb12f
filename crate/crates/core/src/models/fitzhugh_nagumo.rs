use serde::{Deserialize, Serialize};

use super::ModelError;

/// FitzHugh-Nagumo circuit parameters:
///
/// ```text
/// C v̇   = v − v³/3 − i_L + I + u + d
/// L i̇_L = −b·i_L + v + a
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FnParams {
    pub c: f64,
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl Default for FnParams {
    /// The classic FitzHugh values, recovery rate `1/L = 0.08`.
    fn default() -> Self {
        FnParams { c: 1.0, l: 12.5, a: 0.7, b: 0.8 }
    }
}

impl FnParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.c > 0.0) || !(self.l > 0.0) || !(self.b >= 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "FitzHugh-Nagumo needs C > 0, L > 0, b >= 0, got C = {}, L = {}, b = {}",
                self.c, self.l, self.b
            )));
        }
        Ok(())
    }

    /// Copy with `C` and `L` scaled, which changes the spike and recovery time scales.
    pub fn with_time_scales(mut self, c_scale: f64, l_scale: f64) -> Self {
        self.c *= c_scale;
        self.l *= l_scale;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FnState {
    pub v: f64,
    pub i_l: f64,
}

impl FnState {
    pub fn new(v: f64, i_l: f64) -> Self {
        FnState { v, i_l }
    }
}

/// Returns `(v̇, i̇_L)` for drive `i_ext`, control `u` and disturbance `d`.
#[inline]
pub fn fn_dynamics(s: FnState, i_ext: f64, u: f64, d: f64, p: &FnParams) -> [f64; 2] {
    let v = s.v;
    [(v - v * v * v / 3.0 - s.i_l + i_ext + u + d) / p.c, (-p.b * s.i_l + v + p.a) / p.l]
}

/// Equilibrium of the unforced neuron, found by bisection on the cubic
/// `v − v³/3 − (v + a)/b + I = 0` (unique when `b < 1`).
pub fn fn_rest_state(p: &FnParams, i_ext: f64) -> FnState {
    let g = |v: f64| v - v * v * v / 3.0 - (v + p.a) / p.b + i_ext;
    let (mut lo, mut hi) = (-10.0, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let v = 0.5 * (lo + hi);
    FnState { v, i_l: (v + p.a) / p.b }
}
