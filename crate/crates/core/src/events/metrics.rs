use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{mean_std, EventError, EventTrain};
use crate::controllers::wrap_half;

/// Outcome of matching a test train against a reference train.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub matched: usize,
    pub reference_count: usize,
    /// `matched / reference_count`; 1 for an empty reference.
    pub matched_fraction: f64,
    /// Standard deviation of the matched time differences (test − reference).
    pub jitter: f64,
    /// Matched time differences, in reference order.
    pub offsets: Vec<f64>,
    pub unmatched_reference: Vec<f64>,
    pub extra_test: Vec<f64>,
}

/// Greedy time-ordered matching: each reference event, in order, takes the
/// nearest still-unused test event within `window`.
pub fn match_trains(reference: &EventTrain, test: &EventTrain, window: f64) -> MatchReport {
    let r = &reference.times;
    let s = &test.times;
    let mut used = vec![false; s.len()];
    let mut offsets = Vec::new();
    let mut unmatched_reference = Vec::new();
    let mut lo = 0;
    for &tr in r {
        while lo < s.len() && s[lo] < tr - window {
            lo += 1;
        }
        let mut best: Option<(usize, f64)> = None;
        for (j, &ts) in s.iter().enumerate().skip(lo) {
            if ts > tr + window {
                break;
            }
            if used[j] {
                continue;
            }
            let d = (ts - tr).abs();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, _)) => {
                used[j] = true;
                offsets.push(s[j] - tr);
            }
            None => unmatched_reference.push(tr),
        }
    }
    let extra_test = s.iter().zip(&used).filter(|(_, u)| !**u).map(|(t, _)| *t).collect();
    let matched = offsets.len();
    let jitter = if matched > 0 { mean_std(&offsets).1 } else { 0.0 };
    MatchReport {
        matched,
        reference_count: r.len(),
        matched_fraction: if r.is_empty() { 1.0 } else { matched as f64 / r.len() as f64 },
        jitter,
        offsets,
        unmatched_reference,
        extra_test,
    }
}

/// Across-trial reliability relative to the first trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reliability {
    /// Mean matched fraction of trials 1.. against trial 0.
    pub matched_fraction: f64,
    /// Standard deviation of all matched offsets, pooled over trials.
    pub jitter: f64,
}

pub fn reliability(trains: &[EventTrain], window: f64) -> Result<Reliability, EventError> {
    if trains.len() < 2 {
        return Err(EventError::Metric(format!("reliability needs at least 2 trials, got {}", trains.len())));
    }
    let reference = &trains[0];
    let mut fractions = 0.0;
    let mut pooled = Vec::new();
    for t in &trains[1..] {
        let rep = match_trains(reference, t, window);
        fractions += rep.matched_fraction;
        pooled.extend(rep.offsets);
    }
    Ok(Reliability {
        matched_fraction: fractions / (trains.len() - 1) as f64,
        jitter: if pooled.is_empty() { 0.0 } else { mean_std(&pooled).1 },
    })
}

/// Mean circular offset of `a` relative to `b`, in units of `b`'s mean period,
/// wrapped to `(−1/2, 1/2]`.
pub fn phase_offset(a: &EventTrain, b: &EventTrain) -> Result<f64, EventError> {
    if a.len() < 3 || b.len() < 3 {
        return Err(EventError::Metric(format!(
            "phase offset needs at least 3 events per train, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let cv = b.interval_cv().unwrap_or(f64::INFINITY);
    if !(cv < 0.1) {
        return Err(EventError::Metric(format!("reference train is aperiodic (interval cv {cv:.3})")));
    }
    let period = b.mean_interval().expect("at least 3 events");
    let bt = &b.times;
    let (mut c, mut s) = (0.0, 0.0);
    for &t in &a.times {
        let j = bt.partition_point(|&x| x < t);
        let nearest = match j {
            0 => bt[0],
            j if j == bt.len() => bt[j - 1],
            j => {
                if t - bt[j - 1] <= bt[j] - t {
                    bt[j - 1]
                } else {
                    bt[j]
                }
            }
        };
        let phi = TAU * (t - nearest) / period;
        c += phi.cos();
        s += phi.sin();
    }
    Ok(wrap_half(s.atan2(c) / TAU))
}

/// Circular standard deviation, in cycles, of phases given in cycles.
pub fn circular_spread(phases: &[f64]) -> f64 {
    let n = phases.len() as f64;
    let (c, s) = phases.iter().fold((0.0, 0.0), |(c, s), p| (c + (TAU * p).cos(), s + (TAU * p).sin()));
    let r = ((c / n).powi(2) + (s / n).powi(2)).sqrt().min(1.0);
    if r <= 0.0 {
        return f64::INFINITY;
    }
    (-2.0 * r.ln()).sqrt() / TAU
}

/// Test events with no baseline counterpart within `window`.
pub fn spurious_count(baseline: &EventTrain, test: &EventTrain, window: f64) -> usize {
    match_trains(baseline, test, window).extra_test.len()
}
