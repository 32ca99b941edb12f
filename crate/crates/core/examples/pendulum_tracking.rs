//! Pendulum tracking a reference pendulum, with and without error feedback.

use eventreg::controllers::{tracking_control, ReferenceSignals, TrackingGains};
use eventreg::models::{pendulum_dynamics, PendulumParams, PendulumState};
use eventreg::sim::{integrate, ResetSchedule, TimeGrid, VectorField};

fn max_error(gains: TrackingGains) -> Result<f64, Box<dyn std::error::Error>> {
    let plant = PendulumParams::new(1.0, 1.5)?;
    let reference = PendulumParams { a: 1.0, c: 0.0 };
    let mut sys = VectorField::new(&["th", "om", "th_r", "om_r"], move |_t, x: &[f64], dx: &mut [f64]| {
        let r = ReferenceSignals { theta_r: x[2], omega_r: x[3], u_r: 0.0 };
        let u = tracking_control(x[0] - x[2], x[1] - x[3], r, &plant, &reference, &gains);
        dx[..2].copy_from_slice(&pendulum_dynamics(PendulumState::new(x[0], x[1]), u, &plant));
        dx[2..].copy_from_slice(&pendulum_dynamics(PendulumState::new(x[2], x[3]), 0.0, &reference));
    });
    let grid = TimeGrid::span(40.0, 1e-3)?;
    let traj = integrate(&mut sys, &[0.0, 0.0, 2.5, 0.0], &grid, &ResetSchedule::none())?;
    let (th, th_r) = (traj.column("th").unwrap(), traj.column("th_r").unwrap());
    let late = grid.nearest_index(30.0).unwrap();
    Ok(th[late..].iter().zip(&th_r[late..]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (label, gains) in [("feedforward only", TrackingGains { k1: 0.0, k2: 0.0 }), ("with feedback", TrackingGains { k1: 4.0, k2: 2.0 })] {
        println!("{label}: max |e| over t in [30, 40] = {:.3e}", max_error(gains)?);
    }
    Ok(())
}
