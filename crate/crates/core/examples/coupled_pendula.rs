//! Two driven pendula with velocity coupling.

use eventreg::controllers::velocity_coupling;
use eventreg::events::{detect_events, phase_offset, Direction};
use eventreg::models::{pendulum_dynamics, PendulumParams, PendulumState};
use eventreg::sim::{integrate, ResetSchedule, SignalSpec, TimeGrid, VectorField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = TimeGrid::span(100.0, 1e-3)?;
    let drive = SignalSpec::sinusoid(0.0, 0.3, 1.2, 0.0).prepare(grid.t0, grid.t_end)?;
    let p1 = PendulumParams::new(1.0, 0.3)?;
    let p2 = PendulumParams::new(2.0, 0.3)?;
    for k in [0.0, 0.5, 2.0] {
        let d = drive.clone();
        let mut sys = VectorField::new(&["th1", "om1", "th2", "om2"], move |t, x: &[f64], dx: &mut [f64]| {
            let u = d.eval(t).unwrap();
            let c = velocity_coupling(x[1], x[3], k);
            dx[..2].copy_from_slice(&pendulum_dynamics(PendulumState::new(x[0], x[1]), u + c, &p1));
            dx[2..].copy_from_slice(&pendulum_dynamics(PendulumState::new(x[2], x[3]), u - c, &p2));
        });
        let traj = integrate(&mut sys, &[0.3, 0.0, -0.4, 0.0], &grid, &ResetSchedule::none())?;
        let a = detect_events(&traj, "th1", 0.0, Direction::Up, 1.0)?.window(60.0, 100.0);
        let b = detect_events(&traj, "th2", 0.0, Direction::Up, 1.0)?.window(60.0, 100.0);
        match phase_offset(&b, &a) {
            Ok(x) => println!("k = {k}: phase offset {x:+.4} over t in [60, 100]"),
            Err(e) => println!("k = {k}: no steady phase ({e})"),
        }
    }
    Ok(())
}
