//! Windowed DFT helpers shared by feature extraction and the coherence oracle.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Periodic Hann window of length `len`.
pub fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos())
        .collect()
}

/// Hann-windowed forward DFT returning the `len / 2 + 1` non-redundant bins.
#[derive(Clone)]
pub struct WindowedDft {
    window: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for WindowedDft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WindowedDft")
            .field("len", &self.window.len())
            .finish()
    }
}

impl WindowedDft {
    pub fn new(len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::Config(format!("DFT length must be >= 2, got {len}")));
        }
        let fft = FftPlanner::new().plan_fft_forward(len);
        Ok(Self {
            window: hann(len),
            fft,
        })
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    pub fn bins(&self) -> usize {
        self.window.len() / 2 + 1
    }

    pub fn spectrum(&self, samples: &[f64]) -> Result<Vec<Complex64>> {
        if samples.len() != self.window.len() {
            return Err(Error::Dimension {
                what: "block length",
                expected: self.window.len(),
                actual: samples.len(),
            });
        }
        let mut buf: Vec<Complex64> = samples
            .iter()
            .zip(&self.window)
            .map(|(&x, &w)| Complex64::new(x * w, 0.0))
            .collect();
        self.fft.process(&mut buf);
        buf.truncate(self.bins());
        Ok(buf)
    }

    pub fn magnitude(&self, samples: &[f64]) -> Result<Vec<f64>> {
        Ok(self.spectrum(samples)?.iter().map(|c| c.norm()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hann_is_periodic() {
        let w = hann(8);
        assert_eq!(w[0], 0.0);
        assert!((w[4] - 1.0).abs() < 1e-15);
        assert!((w[1] - w[7]).abs() < 1e-15);
    }

    #[test]
    fn integer_bin_sine_leaks_into_two_neighbours_only() {
        let n = 64;
        let dft = WindowedDft::new(n).unwrap();
        let x: Vec<f64> = (0..n)
            .map(|k| (2.0 * PI * 5.0 * k as f64 / n as f64).sin())
            .collect();
        let a = dft.magnitude(&x).unwrap();
        assert_eq!(a.len(), 33);
        assert!((a[4] - a[5] / 2.0).abs() < 1e-9);
        assert!((a[6] - a[5] / 2.0).abs() < 1e-9);
        for (k, v) in a.iter().enumerate() {
            if !(4..=6).contains(&k) {
                assert!(*v < 1e-9, "bin {k} = {v}");
            }
        }
    }

    #[test]
    fn wrong_length_is_rejected() {
        let dft = WindowedDft::new(16).unwrap();
        assert!(dft.spectrum(&[0.0; 8]).is_err());
    }
}
