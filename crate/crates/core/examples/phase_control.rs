//! Event-based phase controller fed by an online burst detector.
//!
//! A sinusoid stands in for the slow voltage of the controlled neuron; measured
//! events arrive a quarter period late and each one opens a pulse whose
//! amplitude is the normalized phase error.

use eventreg::controllers::{PhaseController, PhaseControllerConfig};
use eventreg::events::{Detector, OnlineDetector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = PhaseControllerConfig { amplitude: 1.0, width: 0.5, onset_threshold: 0.0, gain: 1.0 };
    cfg.validate()?;
    let mut ctl = PhaseController::new(cfg);
    let mut onsets = OnlineDetector::new(Detector::up(cfg.onset_threshold, 1.0));
    let period = 8.0;
    let omega = std::f64::consts::TAU / period;
    let dt = 1e-3;
    let mut last_pulse = 0.0;
    for k in 0..=(40.0 / dt) as usize {
        let t = k as f64 * dt;
        if let Some(te) = onsets.push(t, (omega * t).sin()) {
            ctl.record_onset(te);
        }
        // measured events a quarter period after each onset
        if let Some(&on) = ctl.onsets().last() {
            if (t - (on + period / 4.0)).abs() < dt / 2.0 {
                ctl.record_measured(t);
            }
        }
        let i_p = ctl.output(t);
        if i_p != 0.0 && last_pulse == 0.0 {
            println!("t = {t:6.2}: pulse amplitude {i_p:+.3}");
        }
        last_pulse = i_p;
    }
    println!("onsets {:?}", ctl.onsets().iter().map(|t| format!("{t:.2}")).collect::<Vec<_>>());
    Ok(())
}
