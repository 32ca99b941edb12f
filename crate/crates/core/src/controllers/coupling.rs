use crate::models::{synapse_current, SynapseParams};

/// Proportional feedback on the output difference `e = y1 − y2`:
/// returns `(−k1 e, −k2 e)`. With `k2 = 0` this is master-slave regulation.
#[inline]
pub fn diffusive_coupling(y1: f64, y2: f64, k1: f64, k2: f64) -> (f64, f64) {
    let e = y1 - y2;
    (-k1 * e, -k2 * e)
}

/// Velocity coupling `k (ω_j − ω_i)` added to pendulum `i`.
#[inline]
pub fn velocity_coupling(omega_i: f64, omega_j: f64, k: f64) -> f64 {
    k * (omega_j - omega_i)
}

/// Current injected into the postsynaptic cell by a synapse whose activation
/// `z` is driven by the presynaptic voltage. Nothing flows back to the presynaptic cell.
#[inline]
pub fn synaptic_coupling_current(z: f64, y_post: f64, p: &SynapseParams) -> f64 {
    synapse_current(z, y_post, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diffusive_examples() {
        assert_eq!(diffusive_coupling(0.4, 0.4, 3.0, 3.0), (-0.0, -0.0));
        assert_eq!(diffusive_coupling(1.0, 0.0, 3.0, 3.0), (-3.0, -3.0));
        assert_eq!(diffusive_coupling(1.0, -2.0, 3.0, 0.0).1, 0.0);
    }

    #[test]
    fn velocity_examples() {
        assert_eq!(velocity_coupling(0.3, 0.3, 2.0), 0.0);
        assert!((velocity_coupling(0.25, 0.75, 2.0) - 1.0).abs() <= 1e-12);
        let (a, b) = (0.31, -1.7);
        assert_eq!(velocity_coupling(a, b, 0.8), -velocity_coupling(b, a, 0.8));
    }

    #[test]
    fn synaptic_examples() {
        let p = SynapseParams { g: 2.0, e_syn: -2.0, ..SynapseParams::default() };
        assert_eq!(synaptic_coupling_current(0.4, -2.0, &p), 0.0);
        assert_eq!(synaptic_coupling_current(0.4, 1.0, &SynapseParams { g: 0.0, ..p }), 0.0);
        assert!((synaptic_coupling_current(0.5, 0.0, &p) - 2.0).abs() <= 1e-12);
    }
}
