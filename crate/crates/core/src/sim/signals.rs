//! Synthetic source signals.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    #[default]
    /// Pink noise under a syllabic envelope with pauses.
    Speechlike,
    White,
    Tone {
        frequency: f64,
    },
}

pub fn test_signal(kind: SignalKind, duration: f64, sample_rate: f64, seed: u64) -> Vec<f64> {
    test_signal_with(
        kind,
        duration,
        sample_rate,
        &mut ChaCha8Rng::seed_from_u64(seed),
    )
}

pub fn test_signal_with(
    kind: SignalKind,
    duration: f64,
    sample_rate: f64,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let n = (duration * sample_rate).round().max(1.0) as usize;
    let mut x: Vec<f64> = match kind {
        SignalKind::White => (0..n).map(|_| rng.sample(StandardNormal)).collect(),
        SignalKind::Tone { frequency } => (0..n)
            .map(|k| (2.0 * PI * frequency * k as f64 / sample_rate).sin())
            .collect(),
        SignalKind::Speechlike => {
            let pink = pink_noise(n, sample_rate, rng);
            let env = syllabic_envelope(n, sample_rate, rng);
            pink.iter().zip(&env).map(|(p, e)| p * e).collect()
        }
    };
    normalize_peak(&mut x);
    x
}

fn normalize_peak(x: &mut [f64]) {
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        x.iter_mut().for_each(|v| *v /= peak);
    }
}

/// Below this the speech-like spectrum is empty.
pub const PINK_LOW_CUT: f64 = 50.0;
/// Below this the spectrum is flat, above it falls as 1/f.
pub const PINK_CORNER: f64 = 200.0;

/// White Gaussian noise shaped to a 1/f power spectrum above [`PINK_CORNER`],
/// flat down to [`PINK_LOW_CUT`] and empty below.
pub fn pink_noise(n: usize, sample_rate: f64, rng: &mut impl Rng) -> Vec<f64> {
    let mut buf: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let df = sample_rate / n as f64;
    for (k, c) in buf.iter_mut().enumerate() {
        let f = k.min(n - k) as f64 * df;
        *c = if f < PINK_LOW_CUT {
            Complex64::new(0.0, 0.0)
        } else {
            *c / f.max(PINK_CORNER).sqrt()
        };
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// Raised-sine syllables at 2-8 Hz with random 0.2-0.5 s pauses.
pub fn syllabic_envelope(n: usize, sample_rate: f64, rng: &mut impl Rng) -> Vec<f64> {
    let mut env = Vec::with_capacity(n);
    while env.len() < n {
        if rng.random_bool(0.25) {
            let pause = (rng.random_range(0.2..0.5) * sample_rate) as usize;
            env.extend(std::iter::repeat_n(0.0, pause));
            continue;
        }
        let rate: f64 = rng.random_range(2.0..8.0);
        let gain: f64 = rng.random_range(0.5..1.0);
        let len = (sample_rate / rate) as usize;
        env.extend((0..len).map(|k| {
            let s = (PI * k as f64 / len as f64).sin();
            gain * s * s
        }));
    }
    env.truncate(n);
    env
}
