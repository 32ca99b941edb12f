use serde::{Deserialize, Serialize};

use super::ModelError;

/// `θ̈ = −a·sin θ − c·θ̇ + u`. The controlled plant uses `a = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumParams {
    pub a: f64,
    pub c: f64,
}

impl PendulumParams {
    pub fn new(a: f64, c: f64) -> Result<Self, ModelError> {
        let p = PendulumParams { a, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.a > 0.0) || !(self.c > 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "pendulum needs a > 0 and c > 0, got a = {}, c = {}",
                self.a, self.c
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PendulumState {
    pub theta: f64,
    pub omega: f64,
}

impl PendulumState {
    pub fn new(theta: f64, omega: f64) -> Self {
        PendulumState { theta, omega }
    }
}

/// Returns `(θ̇, θ̈)`.
#[inline]
pub fn pendulum_dynamics(s: PendulumState, u: f64, p: &PendulumParams) -> [f64; 2] {
    [s.omega, -p.a * s.theta.sin() - p.c * s.omega + u]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    const P: PendulumParams = PendulumParams { a: 1.0, c: 0.5 };

    #[test]
    fn examples() {
        assert_eq!(pendulum_dynamics(PendulumState::new(0.0, 0.0), 0.0, &P), [0.0, 0.0]);
        let d = pendulum_dynamics(PendulumState::new(FRAC_PI_2, 0.0), 0.0, &P);
        assert!(d[0].abs() <= 1e-12 && (d[1] + 1.0).abs() <= 1e-12);
        assert_eq!(pendulum_dynamics(PendulumState::new(0.0, 2.0), 1.0, &P), [2.0, 0.0]);
    }

    #[test]
    fn rejects_nonpositive_damping() {
        assert!(PendulumParams::new(1.0, 0.0).is_err());
        assert!(PendulumParams::new(-1.0, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn odd_symmetry(theta in -10.0f64..10.0, omega in -5.0f64..5.0, u in -3.0f64..3.0,
                        a in 0.1f64..3.0, c in 0.01f64..3.0) {
            let p = PendulumParams { a, c };
            let f = pendulum_dynamics(PendulumState::new(theta, omega), u, &p);
            let g = pendulum_dynamics(PendulumState::new(-theta, -omega), -u, &p);
            prop_assert!((f[0] + g[0]).abs() < 1e-12);
            prop_assert!((f[1] + g[1]).abs() < 1e-12);
        }
    }
}
