use crate::error::{Error, Result};

/// Histogram resolution of the entropy estimator.
pub const ENTROPY_BINS: usize = 64;

/// Value returned for constant input, where the estimate diverges to -inf.
pub const ENTROPY_FLOOR: f64 = -20.0;

/// Histogram estimate of the differential entropy (nats) of `samples`.
///
/// Uses [`ENTROPY_BINS`] equal-width bins spanning the sample range, so
/// `H = -sum p_b ln p_b + ln(width)`.
pub fn differential_entropy(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InsufficientInput(format!(
            "entropy needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InsufficientInput("non-finite samples".into()));
    }
    let width = (hi - lo) / ENTROPY_BINS as f64;
    if width <= 0.0 {
        return Ok(ENTROPY_FLOOR);
    }
    let mut counts = [0usize; ENTROPY_BINS];
    for &x in samples {
        let b = (((x - lo) / width) as usize).min(ENTROPY_BINS - 1);
        counts[b] += 1;
    }
    let n = samples.len() as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    Ok(h + width.ln())
}

/// Differential entropy of `samples` scaled to unit variance, `H(x) - ln(std x)`.
///
/// Unlike [`differential_entropy`] this ignores the signal level and only
/// reflects the shape of the amplitude distribution: it peaks for Gaussian
/// noise and drops for sparse, structured signals such as speech.
pub fn standardized_entropy(samples: &[f64]) -> Result<f64> {
    let h = differential_entropy(samples)?;
    if h == ENTROPY_FLOOR {
        return Ok(h);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Ok(h - 0.5 * var.ln())
}
