//! Comparing event trains: matching, reliability across trials, phase offset
//! and spurious events.

use eventreg::events::{match_trains, phase_offset, reliability, spurious_count, EventTrain};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reference = EventTrain::new(0, "reference", vec![1.0, 2.0, 3.0])?;
    let test = EventTrain::new(1, "test", vec![1.01, 2.02, 3.01, 5.0])?;
    let rep = match_trains(&reference, &test, 0.05);
    println!(
        "matched {} of {}, jitter {:.4}, extra {:?}",
        rep.matched, rep.reference_count, rep.jitter, rep.extra_test
    );
    println!("spurious events: {}", spurious_count(&reference, &test, 0.05));

    let periodic = |shift: f64| EventTrain::new(0, "p", (0..20).map(|k| shift + 2.0 * k as f64).collect());
    let base = periodic(0.0)?;
    for shift in [0.0, 0.5, 1.0, 1.5] {
        println!("shift {shift}: phase offset {:+.3}", phase_offset(&periodic(shift)?, &base)?);
    }

    let trials: Vec<EventTrain> = (0..5)
        .map(|k| EventTrain::new(k, "trial", (0..20).map(|j| 2.0 * j as f64 + 0.01 * (k % 3) as f64).collect()))
        .collect::<Result<_, _>>()?;
    let rel = reliability(&trials, 0.1)?;
    println!("reliability: matched {:.3}, jitter {:.4}", rel.matched_fraction, rel.jitter);
    Ok(())
}
