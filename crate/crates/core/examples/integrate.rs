//! Fixed-step RK4 on a damped pendulum, with a step-halving order check.

use eventreg::models::{pendulum_dynamics, PendulumParams, PendulumState};
use eventreg::sim::{halving_error, integrate, Reset, ResetSchedule, TimeGrid, VectorField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = PendulumParams::new(1.0, 0.2)?;
    let mut sys = VectorField::new(&["theta", "omega"], move |_t, x: &[f64], dx: &mut [f64]| {
        dx.copy_from_slice(&pendulum_dynamics(PendulumState::new(x[0], x[1]), 0.0, &p));
    });

    // kick the pendulum again at t = 20
    let grid = TimeGrid::span(40.0, 1e-3)?;
    let resets = ResetSchedule::new(vec![Reset { time: 20.0, assign: vec![(0, 1.0), (1, 0.0)] }]);
    let traj = integrate(&mut sys, &[1.0, 0.0], &grid, &resets)?;
    let theta = traj.column("theta").unwrap();
    for t in [0.0, 10.0, 19.999, 20.0, 30.0, 40.0] {
        let k = grid.nearest_index(t).unwrap();
        println!("t = {t:>6}  theta = {:+.6}", theta[k]);
    }

    let mut osc = VectorField::new(&["x", "v"], |_t, x: &[f64], dx: &mut [f64]| {
        dx[0] = x[1];
        dx[1] = -x[0];
    });
    let coarse_grid = TimeGrid::span(5.0, 0.05)?;
    let (coarse, fine) = halving_error(&mut osc, &[1.0, 0.0], &coarse_grid, &[5f64.cos(), -5f64.sin()])?;
    println!("harmonic oscillator: error {coarse:.3e} at dt, {fine:.3e} at dt/2, ratio {:.2}", coarse / fine);
    Ok(())
}
