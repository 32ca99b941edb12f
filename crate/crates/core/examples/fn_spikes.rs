//! FitzHugh-Nagumo neuron under a pulse train and under frozen noise, with
//! spike detection on the voltage.

use eventreg::events::{detect_events, Direction};
use eventreg::models::{fn_dynamics, fn_rest_state, FnParams, FnState};
use eventreg::sim::{integrate, ResetSchedule, SignalSpec, TimeGrid, VectorField};

fn spikes(drive: SignalSpec, seed_label: &str) -> Result<(), Box<dyn std::error::Error>> {
    let p = FnParams::default();
    let grid = TimeGrid::span(400.0, 1e-3)?;
    let input = drive.prepare(grid.t0, grid.t_end)?;
    let mut sys = VectorField::new(&["v", "i_l"], move |t, x: &[f64], dx: &mut [f64]| {
        let i = input.eval(t).unwrap();
        dx.copy_from_slice(&fn_dynamics(FnState::new(x[0], x[1]), i, 0.0, 0.0, &p));
    });
    let rest = fn_rest_state(&p, 0.0);
    let traj = integrate(&mut sys, &[rest.v, rest.i_l], &grid, &ResetSchedule::none())?;
    let train = detect_events(&traj, "v", 1.0, Direction::Up, 5.0)?;
    print!("{seed_label}: {} spikes", train.len());
    if let (Some(isi), Some(cv)) = (train.mean_interval(), train.interval_cv()) {
        print!(", mean ISI {isi:.2}, ISI cv {cv:.3}");
    }
    println!();
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    spikes(SignalSpec::constant(0.0), "no input")?;
    spikes(SignalSpec::constant(0.5), "step 0.5")?;
    spikes(SignalSpec::pulse_train(1.0, 5.0, 40.0, 10.0), "pulses")?;
    spikes(SignalSpec::frozen_noise(0.0, 1.5, 5.0, 7), "noise seed 7")?;
    Ok(())
}
