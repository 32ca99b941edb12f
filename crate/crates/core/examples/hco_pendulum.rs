//! Bursting network driving a pendulum, with typed parameters instead of a
//! JSON config. The cross coupling switches from inhibitory to excitatory
//! halfway through.

use eventreg::experiments::event_pendulum::Params;
use eventreg::experiments::Experiment;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // the period sweep only needs its endpoints here
    let p = Params { g_us_factors: vec![1.0, 1.2], ..Params::default() };
    p.validate()?;
    let out = p.run(1)?;
    for phase in ["inhibitory", "excitatory"] {
        let get = |k: &str| out.metric(&format!("{phase}.{k}")).unwrap_or(f64::NAN);
        println!(
            "{phase}: burst offset {:+.3}, burst period {:.2}, peak |theta| {:.3}, theta events matched {:.2}",
            get("phase_offset"),
            get("burst_period"),
            get("peak_theta"),
            get("theta_matched_fraction"),
        );
    }
    let theta = out.trains("theta");
    println!("{} theta events, {} bursts of neuron 1", theta[0].len(), out.trains("burst_1")[0].len());
    Ok(())
}
