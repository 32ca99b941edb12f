//! Synaptic disturbance rejected with an internal-model observer.
//!
//! A presynaptic neuron inhibits a noisy target through a conductance synapse.
//! One copy of the target is left alone, one receives the synapse, and one
//! receives the synapse plus the compensation `u = −g ẑ (v − E_syn)` built from
//! the observed presynaptic voltage.

use eventreg::controllers::{disturbance_compensation, disturbance_observer_step};
use eventreg::events::{detect_events, match_trains, Direction};
use eventreg::experiments::rejection::spike_synapse;
use eventreg::models::{fn_dynamics, fn_rest_state, synapse_activation_dynamics, synapse_current, FnParams, FnState};
use eventreg::sim::{integrate, ResetSchedule, SignalSpec, TimeGrid, VectorField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = FnParams::default();
    let syn = spike_synapse();
    let grid = TimeGrid::span(600.0, 1e-3)?;
    let noise = SignalSpec::frozen_noise(0.0, 1.5, 5.0, 3).prepare(grid.t0, grid.t_end)?;

    let names = ["v_pre", "i_pre", "z", "z_hat", "v_free", "i_free", "v_dist", "i_dist", "v_comp", "i_comp"];
    let mut sys = VectorField::new(&names, move |t, x: &[f64], dx: &mut [f64]| {
        let i = noise.eval(t).unwrap();
        dx[..2].copy_from_slice(&fn_dynamics(FnState::new(x[0], x[1]), 0.8, 0.0, 0.0, &p));
        dx[2] = synapse_activation_dynamics(x[2], x[0], &syn);
        dx[3] = disturbance_observer_step(x[3], x[0], &syn);
        dx[4..6].copy_from_slice(&fn_dynamics(FnState::new(x[4], x[5]), i, 0.0, 0.0, &p));
        let d = -synapse_current(x[2], x[6], &syn);
        dx[6..8].copy_from_slice(&fn_dynamics(FnState::new(x[6], x[7]), i, 0.0, d, &p));
        let d = -synapse_current(x[2], x[8], &syn);
        let u = -disturbance_compensation(x[3], x[8], &syn);
        dx[8..10].copy_from_slice(&fn_dynamics(FnState::new(x[8], x[9]), i, 0.0, u + d, &p));
    });
    let r = fn_rest_state(&p, 0.0);
    let z0 = syn.activation(r.v);
    let x0 = [r.v, r.i_l, z0, z0, r.v, r.i_l, r.v, r.i_l, r.v, r.i_l];
    let traj = integrate(&mut sys, &x0, &grid, &ResetSchedule::none())?;

    let spikes = |col| detect_events(&traj, col, 1.0, Direction::Up, 5.0);
    let free = spikes("v_free")?;
    println!("presynaptic spikes {}, free target spikes {}", spikes("v_pre")?.len(), free.len());
    for col in ["v_dist", "v_comp"] {
        let rep = match_trains(&free, &spikes(col)?, 1.0);
        println!(
            "{col}: matched {:.3}, missed {}, extra {}",
            rep.matched_fraction,
            rep.unmatched_reference.len(),
            rep.extra_test.len()
        );
    }
    Ok(())
}
