//! Pulse-coupled integrate-and-fire units falling into unison.

use eventreg::models::{IfNetwork, IfUnit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let unit = IfUnit { drive: 1.0, leak: 0.5 };
    let period = unit.period();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x0: Vec<f64> = (0..10).map(|_| rng.random()).collect();

    for eps in [0.0, 0.05, 0.2] {
        let mut net = IfNetwork::identical(10, unit, eps, x0.clone())?;
        let mut synced_at = None;
        let mut largest = 0;
        while net.t < 50.0 * period && synced_at.is_none() {
            for a in net.step(0.1) {
                largest = largest.max(a.units.len());
                if a.units.len() == 10 {
                    synced_at = Some(a.time);
                }
            }
        }
        match synced_at {
            Some(t) => println!("eps {eps}: all 10 fire together after {:.1} periods", t / period),
            None => println!("eps {eps}: no unison within 50 periods (largest avalanche {largest})"),
        }
    }
    Ok(())
}
