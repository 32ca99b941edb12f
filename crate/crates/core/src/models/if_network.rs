//! Pulse-coupled leaky integrate-and-fire units.
//!
//! Each state rises along `ẋ = S − γx` toward threshold 1, fires, resets to 0
//! and kicks every other unit up by `ε`. The rise is concave, so identical
//! units synchronize in finite time for almost every initial condition.

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IfUnit {
    /// Constant drive `S`.
    pub drive: f64,
    /// Leak rate `γ`.
    pub leak: f64,
}

impl IfUnit {
    /// Time to rise from `x` to threshold when uncoupled.
    pub fn time_to_threshold(&self, x: f64) -> f64 {
        if x >= 1.0 {
            return 0.0;
        }
        if self.leak == 0.0 {
            return (1.0 - x) / self.drive;
        }
        let x_inf = self.drive / self.leak;
        ((x_inf - x) / (x_inf - 1.0)).ln() / self.leak
    }

    /// Uncoupled firing period.
    pub fn period(&self) -> f64 {
        self.time_to_threshold(0.0)
    }

    /// Exact uncoupled flow over `dt`.
    #[inline]
    pub fn flow(&self, x: f64, dt: f64) -> f64 {
        if self.leak == 0.0 {
            x + self.drive * dt
        } else {
            let x_inf = self.drive / self.leak;
            x_inf + (x - x_inf) * (-self.leak * dt).exp()
        }
    }
}

/// Units that fired together at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Avalanche {
    pub time: f64,
    pub units: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfNetwork {
    pub units: Vec<IfUnit>,
    /// Pulse increment delivered to every other unit on each firing.
    pub epsilon: f64,
    pub x: Vec<f64>,
    /// Current time.
    #[serde(default)]
    pub t: f64,
}

impl IfNetwork {
    pub fn new(units: Vec<IfUnit>, epsilon: f64, x: Vec<f64>) -> Result<Self, ModelError> {
        let net = IfNetwork { units, epsilon, x, t: 0.0 };
        net.validate()?;
        Ok(net)
    }

    pub fn identical(n: usize, unit: IfUnit, epsilon: f64, x: Vec<f64>) -> Result<Self, ModelError> {
        Self::new(vec![unit; n], epsilon, x)
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.x.len() != self.units.len() {
            return Err(ModelError::InvalidParams(format!(
                "{} states for {} units",
                self.x.len(),
                self.units.len()
            )));
        }
        if !(self.epsilon >= 0.0) {
            return Err(ModelError::InvalidParams(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        for (i, u) in self.units.iter().enumerate() {
            if !(u.leak >= 0.0) || !(u.drive > u.leak) {
                return Err(ModelError::InvalidParams(format!(
                    "unit {i} never reaches threshold (S = {}, gamma = {})",
                    u.drive, u.leak
                )));
            }
        }
        if let Some(i) = self.x.iter().position(|x| !(0.0..=1.0).contains(x)) {
            return Err(ModelError::InvalidParams(format!("state {i} = {} outside [0, 1]", self.x[i])));
        }
        Ok(())
    }

    /// Advances by `dt`, resolving every threshold crossing at its exact time.
    /// Returns the avalanches in time order.
    pub fn step(&mut self, dt: f64) -> Vec<Avalanche> {
        let mut out = Vec::new();
        let t_end = self.t + dt;
        loop {
            // Units already at threshold fire before any further flow.
            if self.x.iter().any(|&x| x >= 1.0) {
                out.push(self.avalanche());
                continue;
            }
            let remaining = t_end - self.t;
            let (first, tau) = self
                .units
                .iter()
                .zip(&self.x)
                .map(|(u, &x)| u.time_to_threshold(x))
                .enumerate()
                .fold((usize::MAX, f64::INFINITY), |acc, (i, tau)| if tau < acc.1 { (i, tau) } else { acc });
            if first == usize::MAX || tau > remaining {
                for (x, u) in self.x.iter_mut().zip(&self.units) {
                    *x = u.flow(*x, remaining).min(1.0);
                }
                self.t = t_end;
                return out;
            }
            for (x, u) in self.x.iter_mut().zip(&self.units) {
                *x = u.flow(*x, tau).min(1.0);
            }
            self.x[first] = 1.0;
            self.t += tau;
        }
    }

    /// Fires every unit at threshold and propagates pulses until no unit is
    /// left at threshold. Fired units are absorbed: they do not receive
    /// further pulses within the same avalanche.
    fn avalanche(&mut self) -> Avalanche {
        let n = self.x.len();
        let mut fired = vec![false; n];
        let mut wave: Vec<usize> = (0..n).filter(|&i| self.x[i] >= 1.0).collect();
        while !wave.is_empty() {
            for &i in &wave {
                fired[i] = true;
                self.x[i] = 0.0;
            }
            let kick = self.epsilon * wave.len() as f64;
            for i in 0..n {
                if !fired[i] {
                    self.x[i] = (self.x[i] + kick).min(1.0);
                }
            }
            wave = (0..n).filter(|&i| !fired[i] && self.x[i] >= 1.0).collect();
        }
        Avalanche { time: self.t, units: (0..n).filter(|&i| fired[i]).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const UNIT: IfUnit = IfUnit { drive: 1.0, leak: 0.5 };

    #[test]
    fn single_unit_period() {
        let mut net = IfNetwork::identical(1, UNIT, 0.0, vec![0.0]).unwrap();
        let mut times = Vec::new();
        for _ in 0..10_000 {
            times.extend(net.step(1e-3).into_iter().map(|a| a.time));
        }
        let expected = 2.0 * 2f64.ln();
        assert!(times.len() >= 5);
        for (k, t) in times.iter().enumerate() {
            assert!((t - expected * (k + 1) as f64).abs() < 1e-9, "{t}");
        }
    }

    #[test]
    fn synchronous_pair_stays_synchronous() {
        let delta = 1e-3;
        let mut net = IfNetwork::identical(2, UNIT, 0.1, vec![1.0 - delta; 2]).unwrap();
        let mut n = 0;
        for _ in 0..5000 {
            for a in net.step(1e-3) {
                assert_eq!(a.units, vec![0, 1]);
                n += 1;
            }
        }
        assert!(n > 3);
    }

    #[test]
    fn pulse_pushes_partner_over_threshold() {
        let mut net = IfNetwork::identical(2, UNIT, 0.2, vec![0.999_999, 0.85]).unwrap();
        let av = net.step(1e-3);
        assert_eq!(av.len(), 1);
        assert_eq!(av[0].units, vec![0, 1]);
        assert_eq!(net.x[0], net.x[1]);
    }

    #[test]
    fn validation() {
        assert!(IfNetwork::identical(2, IfUnit { drive: 0.5, leak: 0.5 }, 0.1, vec![0.0, 0.0]).is_err());
        assert!(IfNetwork::identical(2, UNIT, -0.1, vec![0.0, 0.0]).is_err());
        assert!(IfNetwork::identical(2, UNIT, 0.1, vec![0.0, 1.5]).is_err());
        assert!(IfNetwork::identical(2, UNIT, 0.1, vec![0.0]).is_err());
    }

    proptest! {
        #[test]
        fn states_stay_in_unit_interval(x in proptest::collection::vec(0.0f64..1.0, 2..8), eps in 0.0f64..0.3) {
            let n = x.len();
            let mut net = IfNetwork::identical(n, UNIT, eps, x).unwrap();
            for _ in 0..400 {
                net.step(0.01);
                prop_assert!(net.x.iter().all(|x| (0.0..=1.0).contains(x)));
            }
        }

        #[test]
        fn uncoupled_units_fire_on_schedule(x0 in 0.0f64..0.99) {
            let mut net = IfNetwork::identical(2, UNIT, 0.0, vec![x0, 0.0]).unwrap();
            let first = UNIT.time_to_threshold(x0);
            let mut times = Vec::new();
            for _ in 0..300 {
                for a in net.step(0.01) {
                    if a.units.contains(&0) {
                        times.push(a.time);
                    }
                }
            }
            for (k, t) in times.iter().enumerate() {
                prop_assert!((t - (first + k as f64 * UNIT.period())).abs() < 1e-9);
            }
        }
    }
}
