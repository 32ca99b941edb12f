//! Four bursting neurons in two mutually coupled groups. Inhibitory cross
//! coupling gives anti-phase bursts, weak excitation gives in-phase bursts.

use eventreg::events::{phase_offset, Detector, EventTrain};
use eventreg::models::{HcoNetwork, HcoNeuronParams};
use eventreg::sim::{integrate_sampled, ResetSchedule, TimeGrid, VectorField};

fn bursts(g_cross: f64) -> Result<(EventTrain, EventTrain), Box<dyn std::error::Error>> {
    let net = HcoNetwork::two_groups(HcoNeuronParams::default().time_scaled(0.005), g_cross);
    net.validate()?;
    let names: Vec<String> = (1..=4).flat_map(|i| [format!("v{i}"), format!("vs{i}"), format!("vus{i}")]).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut sys = VectorField::new(&names, move |_t, x: &[f64], dx: &mut [f64]| net.derivative(x, &[0.0; 4], dx));
    let grid = TimeGrid::span(200.0, 1e-3)?;
    let x0 = [-1.0, -1.0, -1.0, -1.0, -1.0, -1.0, 0.5, 0.0, -0.8, 0.5, 0.0, -0.8];
    let traj = integrate_sampled(&mut sys, &x0, &grid, &ResetSchedule::none(), 10)?;
    let detect = |col: &str| {
        let times = Detector::up(-1.0, 2.0).detect(traj.grid.t0, traj.grid.dt, traj.column(col).unwrap());
        EventTrain::new(0, col, times).unwrap().window(40.0, 200.0)
    };
    Ok((detect("vs1"), detect("vs3")))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for g in [-0.5, 0.1] {
        let (a, b) = bursts(g)?;
        println!(
            "g_cross {g:+}: {} bursts, period {:.2}, phase offset {:+.3}",
            a.len(),
            a.mean_interval().unwrap_or(f64::NAN),
            phase_offset(&a, &b)?
        );
    }
    Ok(())
}
