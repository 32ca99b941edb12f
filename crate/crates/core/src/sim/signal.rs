use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::SimError;

/// Declarative input signal. Evaluation is a pure function of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalSpec {
    Constant {
        level: f64,
    },
    /// `offset + amplitude * sin(omega * t + phase)`
    Sinusoid {
        offset: f64,
        amplitude: f64,
        omega: f64,
        phase: f64,
    },
    /// Rectangular pulses of `width` every `period`, the first one at `start`.
    PulseTrain {
        amplitude: f64,
        width: f64,
        period: f64,
        start: f64,
    },
    /// Gaussian samples held constant over intervals of length `hold`.
    FrozenNoise {
        mean: f64,
        std: f64,
        hold: f64,
        seed: u64,
    },
    Piecewise {
        pieces: Vec<Piece>,
    },
    /// Pointwise sum, used to superpose per-trial perturbations on a shared input.
    Sum {
        terms: Vec<SignalSpec>,
    },
}

/// One interval of a piecewise signal, covering `[start, end)`; an absent `end` is unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub start: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<f64>,
    pub signal: SignalSpec,
}

impl Piece {
    fn contains(&self, t: f64) -> bool {
        t >= self.start && self.end.is_none_or(|end| t < end)
    }
}

impl SignalSpec {
    pub fn constant(level: f64) -> Self {
        SignalSpec::Constant { level }
    }

    pub fn sinusoid(offset: f64, amplitude: f64, omega: f64, phase: f64) -> Self {
        SignalSpec::Sinusoid { offset, amplitude, omega, phase }
    }

    pub fn frozen_noise(mean: f64, std: f64, hold: f64, seed: u64) -> Self {
        SignalSpec::FrozenNoise { mean, std, hold, seed }
    }

    pub fn pulse_train(amplitude: f64, width: f64, period: f64, start: f64) -> Self {
        SignalSpec::PulseTrain { amplitude, width, period, start }
    }

    /// Checks parameter sanity without evaluating.
    pub fn validate(&self) -> Result<(), SimError> {
        match self {
            SignalSpec::FrozenNoise { hold, std, .. } => {
                if !(*hold > 0.0) {
                    return Err(SimError::InvalidSignal(format!("hold must be positive, got {hold}")));
                }
                if !(*std >= 0.0) {
                    return Err(SimError::InvalidSignal(format!("std must be non-negative, got {std}")));
                }
            }
            SignalSpec::PulseTrain { width, period, .. } => {
                if !(*period > 0.0) || !(*width >= 0.0) {
                    return Err(SimError::InvalidSignal(format!(
                        "pulse train needs period > 0 and width >= 0, got period {period}, width {width}"
                    )));
                }
            }
            SignalSpec::Piecewise { pieces } => {
                for w in pieces.windows(2) {
                    if w[1].start < w[0].start {
                        return Err(SimError::InvalidSignal("piecewise intervals must be ordered".into()));
                    }
                }
                for p in pieces {
                    p.signal.validate()?;
                }
            }
            SignalSpec::Sum { terms } => {
                for s in terms {
                    s.validate()?;
                }
            }
            SignalSpec::Constant { .. } | SignalSpec::Sinusoid { .. } => {}
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<f64, SimError> {
        Ok(match self {
            SignalSpec::Constant { level } => *level,
            SignalSpec::Sinusoid { offset, amplitude, omega, phase } => {
                offset + amplitude * (omega * t + phase).sin()
            }
            SignalSpec::PulseTrain { amplitude, width, period, start } => {
                if t < *start {
                    0.0
                } else {
                    let phase = (t - start).rem_euclid(*period);
                    if phase < *width {
                        *amplitude
                    } else {
                        0.0
                    }
                }
            }
            SignalSpec::FrozenNoise { mean, std, hold, seed } => {
                mean + std * noise_sample(*seed, hold_index(t, *hold))
            }
            SignalSpec::Piecewise { pieces } => {
                let piece = pieces
                    .iter()
                    .find(|p| p.contains(t))
                    .ok_or(SimError::SignalDomain { t })?;
                piece.signal.eval(t)?
            }
            SignalSpec::Sum { terms } => {
                let mut acc = 0.0;
                for s in terms {
                    acc += s.eval(t)?;
                }
                acc
            }
        })
    }
}

/// Evaluation form of a [`SignalSpec`] with frozen-noise samples tabulated
/// over a time range. Values equal those of the spec; outside the tabulated
/// range samples are drawn on demand.
#[derive(Debug, Clone, PartialEq)]
pub enum Signal {
    Plain(SignalSpec),
    Noise { mean: f64, std: f64, hold: f64, seed: u64, first: i64, table: Vec<f64> },
    Piecewise(Vec<(f64, Option<f64>, Signal)>),
    Sum(Vec<Signal>),
}

impl SignalSpec {
    /// Validates and tabulates the signal for evaluation on `[t0, t_end]`.
    pub fn prepare(&self, t0: f64, t_end: f64) -> Result<Signal, SimError> {
        self.validate()?;
        Ok(self.prepare_unchecked(t0, t_end))
    }

    fn prepare_unchecked(&self, t0: f64, t_end: f64) -> Signal {
        match self {
            SignalSpec::FrozenNoise { mean, std, hold, seed } => {
                let first = hold_index(t0, *hold);
                let last = hold_index(t_end, *hold) + 1;
                let table = (first..=last).map(|k| noise_sample(*seed, k)).collect();
                Signal::Noise { mean: *mean, std: *std, hold: *hold, seed: *seed, first, table }
            }
            SignalSpec::Piecewise { pieces } => Signal::Piecewise(
                pieces.iter().map(|p| (p.start, p.end, p.signal.prepare_unchecked(t0, t_end))).collect(),
            ),
            SignalSpec::Sum { terms } => Signal::Sum(terms.iter().map(|s| s.prepare_unchecked(t0, t_end)).collect()),
            other => Signal::Plain(other.clone()),
        }
    }
}

impl Signal {
    pub fn eval(&self, t: f64) -> Result<f64, SimError> {
        match self {
            Signal::Plain(spec) => spec.eval(t),
            Signal::Noise { mean, std, hold, seed, first, table } => {
                let k = hold_index(t, *hold);
                let z = usize::try_from(k - first).ok().and_then(|i| table.get(i).copied());
                Ok(mean + std * z.unwrap_or_else(|| noise_sample(*seed, k)))
            }
            Signal::Piecewise(pieces) => {
                let (_, _, s) = pieces
                    .iter()
                    .find(|(start, end, _)| t >= *start && end.is_none_or(|e| t < e))
                    .ok_or(SimError::SignalDomain { t })?;
                s.eval(t)
            }
            Signal::Sum(terms) => terms.iter().try_fold(0.0, |acc, s| Ok(acc + s.eval(t)?)),
        }
    }
}

/// Index of the hold interval containing `t`. A tiny forward bias keeps grid
/// points that land a rounding error below an interval boundary in the later interval.
#[inline]
pub fn hold_index(t: f64, hold: f64) -> i64 {
    (t / hold + 1e-9).floor() as i64
}

/// Standard normal sample number `k` of the stream identified by `seed`.
///
/// Counter based: ChaCha8 keyed by the seed, with the interval index selecting the stream,
/// so any sample can be drawn without replaying its predecessors.
pub fn noise_sample(seed: u64, k: i64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng.sample(StandardNormal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_level() {
        assert_eq!(SignalSpec::constant(1.5).eval(7.0).unwrap(), 1.5);
    }

    #[test]
    fn sinusoid_peak() {
        let s = SignalSpec::sinusoid(0.5, 0.5, 1.0, 0.0);
        assert!((s.eval(PI / 2.0).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn frozen_noise_holds_within_interval() {
        let hold = 0.25;
        let s = SignalSpec::frozen_noise(0.0, 1.0, hold, 42);
        let t = 3.0 * hold + 0.01;
        assert_eq!(s.eval(t).unwrap(), s.eval(t + hold / 2.0).unwrap());
        assert_ne!(s.eval(t).unwrap(), s.eval(t + hold).unwrap());
    }

    #[test]
    fn frozen_noise_is_pure() {
        let s = SignalSpec::frozen_noise(0.3, 2.0, 1e-3, 7);
        let a: Vec<f64> = (0..100).map(|k| s.eval(k as f64 * 1e-3).unwrap()).collect();
        let b: Vec<f64> = (0..100).rev().map(|k| s.eval(k as f64 * 1e-3).unwrap()).collect();
        let b: Vec<f64> = b.into_iter().rev().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn frozen_noise_statistics() {
        let n = 20000;
        let xs: Vec<f64> = (0..n).map(|k| noise_sample(3, k)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.03, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn piecewise_switch_and_gap() {
        let s = SignalSpec::Piecewise {
            pieces: vec![
                Piece { start: 0.0, end: Some(33.0), signal: SignalSpec::sinusoid(0.0, 1.0, 1.0, 0.0) },
                Piece { start: 33.0, end: Some(66.0), signal: SignalSpec::constant(1.5) },
            ],
        };
        assert_eq!(s.eval(40.0).unwrap(), 1.5);
        assert!((s.eval(1.0).unwrap() - 1f64.sin()).abs() < 1e-15);
        assert!(matches!(s.eval(70.0), Err(SimError::SignalDomain { .. })));
    }

    #[test]
    fn pulse_train_shape() {
        let s = SignalSpec::pulse_train(2.0, 1.0, 10.0, 5.0);
        assert_eq!(s.eval(4.9).unwrap(), 0.0);
        assert_eq!(s.eval(5.5).unwrap(), 2.0);
        assert_eq!(s.eval(6.5).unwrap(), 0.0);
        assert_eq!(s.eval(15.2).unwrap(), 2.0);
    }

    #[test]
    fn json_shape() {
        let s = SignalSpec::frozen_noise(0.1, 0.2, 0.5, 9);
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.contains("\"kind\":\"frozen_noise\""));
        let back: SignalSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn prepared_matches_spec() {
        let spec = SignalSpec::Sum {
            terms: vec![
                SignalSpec::frozen_noise(0.2, 0.7, 0.5, 11),
                SignalSpec::Piecewise {
                    pieces: vec![
                        Piece { start: 0.0, end: Some(3.0), signal: SignalSpec::sinusoid(0.0, 1.0, 2.0, 0.1) },
                        Piece { start: 3.0, end: None, signal: SignalSpec::frozen_noise(0.0, 1.0, 0.1, 5) },
                    ],
                },
            ],
        };
        let prepared = spec.prepare(0.0, 5.0).unwrap();
        for k in 0..800 {
            let t = k as f64 * 0.01;
            assert_eq!(prepared.eval(t).unwrap(), spec.eval(t).unwrap(), "t = {t}");
        }
    }
}
