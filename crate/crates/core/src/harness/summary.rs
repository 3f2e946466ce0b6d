//! Per-frame quartiles of the correlation metric across trials.

use crate::error::{Error, Result};
use crate::stats::percentile;

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub q25: Vec<Option<f64>>,
    pub median: Vec<Option<f64>>,
    pub q75: Vec<Option<f64>>,
    /// Trials with a defined value, per frame.
    pub defined: Vec<usize>,
}

impl BatchSummary {
    pub fn frames(&self) -> usize {
        self.median.len()
    }

    /// Median of the per-frame medians over `frames`.
    pub fn median_over(&self, frames: std::ops::Range<usize>) -> Option<f64> {
        let v: Vec<f64> = self.median[frames].iter().flatten().copied().collect();
        crate::stats::median(&v)
    }
}

pub fn batch_summary(trials: &[Vec<Option<f64>>]) -> Result<BatchSummary> {
    let Some(first) = trials.first() else {
        return Err(Error::EmptyBatch);
    };
    let frames = first.len();
    if let Some(bad) = trials.iter().find(|t| t.len() != frames) {
        return Err(Error::Dimension {
            what: "frames per trial",
            expected: frames,
            actual: bad.len(),
        });
    }
    let mut s = BatchSummary {
        q25: Vec::with_capacity(frames),
        median: Vec::with_capacity(frames),
        q75: Vec::with_capacity(frames),
        defined: Vec::with_capacity(frames),
    };
    for l in 0..frames {
        let v: Vec<f64> = trials.iter().filter_map(|t| t[l]).collect();
        s.q25.push(percentile(&v, 0.25));
        s.median.push(percentile(&v, 0.5));
        s.q75.push(percentile(&v, 0.75));
        s.defined.push(v.len());
    }
    Ok(s)
}
