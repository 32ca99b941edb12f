use serde::{Deserialize, Serialize};

use super::ModelError;

/// Offset of the slow positive and ultraslow negative feedback sigmoids.
const SLOW_OFFSET: f64 = 0.9;

/// Parameters of one bursting neuron with fast, slow and ultraslow feedback:
///
/// ```text
/// τ_f v̇    = −v + g_f⁻ tanh(v) − g_s⁺ tanh(v_s) + g_s⁻ tanh(v_s + 0.9)
///            − g_us⁺ tanh(v_us + 0.9) + I_syn + i_p
/// τ_s v̇_s  = v − v_s
/// τ_us v̇_us = v − v_us
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HcoNeuronParams {
    pub tau_f: f64,
    pub tau_s: f64,
    pub tau_us: f64,
    pub g_f_minus: f64,
    pub g_s_plus: f64,
    pub g_s_minus: f64,
    pub g_us_plus: f64,
}

impl Default for HcoNeuronParams {
    /// Intrinsically bursting with zero input (about a dozen spikes per burst).
    /// Raising `g_us_plus` shortens the burst period: about 8% for +10% and 13% for +20%.
    fn default() -> Self {
        HcoNeuronParams {
            tau_f: 1.0,
            tau_s: 50.0,
            tau_us: 2500.0,
            g_f_minus: 2.0,
            g_s_plus: 2.0,
            g_s_minus: 1.5,
            g_us_plus: 2.0,
        }
    }
}

impl HcoNeuronParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(0.0 < self.tau_f && self.tau_f < self.tau_s && self.tau_s < self.tau_us) {
            return Err(ModelError::InvalidParams(format!(
                "HCO neuron needs 0 < tau_f < tau_s < tau_us, got {} / {} / {}",
                self.tau_f, self.tau_s, self.tau_us
            )));
        }
        let g = [self.g_f_minus, self.g_s_plus, self.g_s_minus, self.g_us_plus];
        if g.iter().any(|g| !(*g >= 0.0)) {
            return Err(ModelError::InvalidParams(format!("HCO conductances must be non-negative, got {g:?}")));
        }
        Ok(())
    }

    /// Same neuron running `factor` times slower (all time constants scaled).
    pub fn time_scaled(mut self, factor: f64) -> Self {
        self.tau_f *= factor;
        self.tau_s *= factor;
        self.tau_us *= factor;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HcoNeuronState {
    pub v: f64,
    pub v_s: f64,
    pub v_us: f64,
}

impl HcoNeuronState {
    pub fn new(v: f64, v_s: f64, v_us: f64) -> Self {
        HcoNeuronState { v, v_s, v_us }
    }
}

/// Right-hand sides divided by their time constants: `(v̇, v̇_s, v̇_us)`.
#[inline]
pub fn hco_neuron_dynamics(s: HcoNeuronState, i_syn: f64, i_p: f64, p: &HcoNeuronParams) -> [f64; 3] {
    let fast = -s.v + p.g_f_minus * s.v.tanh() - p.g_s_plus * s.v_s.tanh() + p.g_s_minus * (s.v_s + SLOW_OFFSET).tanh()
        - p.g_us_plus * (s.v_us + SLOW_OFFSET).tanh()
        + i_syn
        + i_p;
    [fast / p.tau_f, (s.v - s.v_s) / p.tau_s, (s.v - s.v_us) / p.tau_us]
}

/// `I_syn,ij = g_syn,ij / (1 + exp(−2(v_s,j + 1)))`
#[inline]
pub fn hco_synaptic_current(v_s_pre: f64, g_syn: f64) -> f64 {
    g_syn / (1.0 + (-2.0 * (v_s_pre + 1.0)).exp())
}

/// Bursting neurons coupled through slow-voltage synapses. `g_syn[i][j]` is the
/// gain from presynaptic `j` to postsynaptic `i`; negative is inhibitory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HcoNetwork {
    pub neurons: Vec<HcoNeuronParams>,
    pub g_syn: Vec<Vec<f64>>,
}

impl HcoNetwork {
    /// Four identical neurons in two groups `{1, 2}` and `{3, 4}`; every neuron
    /// projects to both neurons of the other group with gain `g_cross`.
    pub fn two_groups(neuron: HcoNeuronParams, g_cross: f64) -> Self {
        let mut g_syn = vec![vec![0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                if (i < 2) != (j < 2) {
                    g_syn[i][j] = g_cross;
                }
            }
        }
        HcoNetwork { neurons: vec![neuron; 4], g_syn }
    }

    pub fn len(&self) -> usize {
        self.neurons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neurons.is_empty()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.neurons.len();
        if self.g_syn.len() != n || self.g_syn.iter().any(|row| row.len() != n) {
            return Err(ModelError::InvalidParams(format!("g_syn must be {n}x{n}")));
        }
        if (0..n).any(|i| self.g_syn[i][i] != 0.0) {
            return Err(ModelError::InvalidParams("g_syn diagonal must be zero".into()));
        }
        for p in &self.neurons {
            p.validate()?;
        }
        Ok(())
    }

    /// Copy with every synaptic gain multiplied by `factor` (−1 flips inhibition to excitation).
    pub fn scaled_synapses(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for row in &mut out.g_syn {
            for g in row.iter_mut() {
                *g *= factor;
            }
        }
        out
    }

    /// Summed synaptic current into neuron `i`, given all slow voltages.
    pub fn synaptic_input(&self, i: usize, v_s: impl Fn(usize) -> f64) -> f64 {
        self.g_syn[i]
            .iter()
            .enumerate()
            .filter(|(_, g)| **g != 0.0)
            .map(|(j, g)| hco_synaptic_current(v_s(j), *g))
            .sum()
    }

    /// Network vector field on the flat state `[v_1, v_s1, v_us1, v_2, ...]`.
    pub fn derivative(&self, x: &[f64], i_p: &[f64], dx: &mut [f64]) {
        for i in 0..self.neurons.len() {
            let s = HcoNeuronState::new(x[3 * i], x[3 * i + 1], x[3 * i + 2]);
            let i_syn = self.synaptic_input(i, |j| x[3 * j + 1]);
            let d = hco_neuron_dynamics(s, i_syn, i_p[i], &self.neurons[i]);
            dx[3 * i..3 * i + 3].copy_from_slice(&d);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pure_leak() {
        let p = HcoNeuronParams { g_f_minus: 0.0, g_s_plus: 0.0, g_s_minus: 0.0, g_us_plus: 0.0, ..Default::default() };
        let d = hco_neuron_dynamics(HcoNeuronState::new(1.0, 0.2, -0.4), 0.0, 0.0, &p);
        assert!((d[0] + 1.0 / p.tau_f).abs() <= 1e-12);
    }

    #[test]
    fn slow_variables_track_voltage() {
        let p = HcoNeuronParams::default();
        let d = hco_neuron_dynamics(HcoNeuronState::new(0.4, 0.4, -1.0), 0.0, 0.0, &p);
        assert_eq!(d[1], 0.0);
        let d = hco_neuron_dynamics(HcoNeuronState::new(0.4, 1.0, 0.4), 0.0, 0.0, &p);
        assert_eq!(d[2], 0.0);
    }

    #[test]
    fn synaptic_current_examples() {
        assert!((hco_synaptic_current(-1.0, 0.8) - 0.4).abs() <= 1e-12);
        assert_eq!(hco_synaptic_current(0.3, 0.0), 0.0);
        let expected = 1.0 / (1.0 + (-2f64).exp());
        assert!((hco_synaptic_current(0.0, 1.0) - expected).abs() <= 1e-12);
        assert!((expected - 0.8808).abs() < 1e-4);
    }

    #[test]
    fn network_validation() {
        let mut net = HcoNetwork::two_groups(HcoNeuronParams::default(), -0.5);
        assert!(net.validate().is_ok());
        assert_eq!(net.g_syn[0][2], -0.5);
        assert_eq!(net.g_syn[0][1], 0.0);
        net.g_syn[1][1] = 0.1;
        assert!(net.validate().is_err());
        let bad = HcoNeuronParams { tau_s: 0.5, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    proptest! {
        #[test]
        fn synaptic_current_monotone_and_bounded(a in -5.0f64..5.0, b in -5.0f64..5.0, g in 0.01f64..3.0) {
            prop_assume!((a - b).abs() > 1e-3);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(hco_synaptic_current(lo, g) < hco_synaptic_current(hi, g));
            prop_assert!(hco_synaptic_current(lo, -g) > hco_synaptic_current(hi, -g));
            let i = hco_synaptic_current(a, g);
            prop_assert!(i > 0.0 && i < g);
            let i = hco_synaptic_current(a, -g);
            prop_assert!(i < 0.0 && i > -g);
        }
    }
}
