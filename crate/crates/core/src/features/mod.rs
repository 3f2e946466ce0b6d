//! Single-channel feature extraction.
//!
//! A channel signal is cut into overlapping blocks; every block yields the
//! active subset of the 18 descriptors in [`FeatureId`], its energy, and the
//! negated differential entropy held from a longer entropy block.

mod entropy;
mod spectral;
mod temporal;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dsp::WindowedDft;
use crate::error::{Error, Result};

pub use entropy::{differential_entropy, standardized_entropy, ENTROPY_BINS, ENTROPY_FLOOR};
pub use spectral::flatness as spectral_flatness;

/// One block of a microphone channel.
#[derive(Debug, Clone, Copy)]
pub struct SignalBlock<'a> {
    pub samples: &'a [f64],
    pub channel_index: usize,
    pub frame_index: usize,
    pub sample_rate: f64,
}

impl SignalBlock<'_> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Number of complete frames of `block_len` samples advanced by `shift`.
pub fn frame_count(signal_len: usize, block_len: usize, shift: usize) -> usize {
    if signal_len < block_len || shift == 0 {
        0
    } else {
        (signal_len - block_len) / shift + 1
    }
}

/// Cut `signal` into blocks; frame `l` covers `[l * shift, l * shift + block_len)`.
/// A trailing partial block is dropped.
pub fn frame_signal(
    signal: &[f64],
    block_len: usize,
    shift: usize,
    channel_index: usize,
    sample_rate: f64,
) -> Result<Vec<SignalBlock<'_>>> {
    if block_len < 2 || shift == 0 || shift > block_len {
        return Err(Error::Config(format!(
            "invalid framing: block_len={block_len}, shift={shift}"
        )));
    }
    if sample_rate <= 0.0 {
        return Err(Error::Config(format!(
            "sample rate must be > 0, got {sample_rate}"
        )));
    }
    if signal.len() < block_len {
        return Err(Error::InsufficientInput(format!(
            "signal has {} samples, one block needs {block_len}",
            signal.len()
        )));
    }
    Ok((0..frame_count(signal.len(), block_len, shift))
        .map(|l| SignalBlock {
            samples: &signal[l * shift..l * shift + block_len],
            channel_index,
            frame_index: l,
            sample_rate,
        })
        .collect())
}

/// Sum of squared samples.
pub fn frame_energy(block: &SignalBlock<'_>) -> f64 {
    block.samples.iter().map(|x| x * x).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureId {
    TdEnvelope,
    TdZcr,
    TdCentroid,
    TdSpread,
    TdSkewness,
    TdKurtosis,
    SdSlope,
    SdFlatness,
    SdAmpflatness,
    SdRolloff,
    SdFlux,
    SdVariation,
    SdCentroid,
    SdSpread,
    SdSkewness,
    SdKurtosis,
    SdFluxnorm,
    Entropy,
}

impl FeatureId {
    pub const COUNT: usize = 18;

    pub const ALL: [FeatureId; Self::COUNT] = [
        FeatureId::TdEnvelope,
        FeatureId::TdZcr,
        FeatureId::TdCentroid,
        FeatureId::TdSpread,
        FeatureId::TdSkewness,
        FeatureId::TdKurtosis,
        FeatureId::SdSlope,
        FeatureId::SdFlatness,
        FeatureId::SdAmpflatness,
        FeatureId::SdRolloff,
        FeatureId::SdFlux,
        FeatureId::SdVariation,
        FeatureId::SdCentroid,
        FeatureId::SdSpread,
        FeatureId::SdSkewness,
        FeatureId::SdKurtosis,
        FeatureId::SdFluxnorm,
        FeatureId::Entropy,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureId::TdEnvelope => "td_envelope",
            FeatureId::TdZcr => "td_zcr",
            FeatureId::TdCentroid => "td_centroid",
            FeatureId::TdSpread => "td_spread",
            FeatureId::TdSkewness => "td_skewness",
            FeatureId::TdKurtosis => "td_kurtosis",
            FeatureId::SdSlope => "sd_slope",
            FeatureId::SdFlatness => "sd_flatness",
            FeatureId::SdAmpflatness => "sd_ampflatness",
            FeatureId::SdRolloff => "sd_rolloff",
            FeatureId::SdFlux => "sd_flux",
            FeatureId::SdVariation => "sd_variation",
            FeatureId::SdCentroid => "sd_centroid",
            FeatureId::SdSpread => "sd_spread",
            FeatureId::SdSkewness => "sd_skewness",
            FeatureId::SdKurtosis => "sd_kurtosis",
            FeatureId::SdFluxnorm => "sd_fluxnorm",
            FeatureId::Entropy => "entropy",
        }
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown feature `{s}`")))
    }
}

/// Ordered, duplicate-free selection of features.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<FeatureId>", into = "Vec<FeatureId>")]
pub struct FeatureSet(Vec<FeatureId>);

impl FeatureSet {
    pub fn new(ids: impl IntoIterator<Item = FeatureId>) -> Result<Self> {
        let ids: Vec<FeatureId> = ids.into_iter().collect();
        if ids.is_empty() {
            return Err(Error::Config("feature set must not be empty".into()));
        }
        for (k, id) in ids.iter().enumerate() {
            if ids[..k].contains(id) {
                return Err(Error::Config(format!("feature `{id}` listed twice")));
            }
        }
        Ok(Self(ids))
    }

    /// td_skewness, sd_slope, sd_kurtosis, sd_fluxnorm.
    pub fn selected_four() -> Self {
        Self(vec![
            FeatureId::TdSkewness,
            FeatureId::SdSlope,
            FeatureId::SdKurtosis,
            FeatureId::SdFluxnorm,
        ])
    }

    pub fn all() -> Self {
        Self(FeatureId::ALL.to_vec())
    }

    pub fn ids(&self) -> &[FeatureId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, id: FeatureId) -> Option<usize> {
        self.0.iter().position(|&x| x == id)
    }
}

impl Default for FeatureSet {
    fn default() -> Self {
        Self::selected_four()
    }
}

impl TryFrom<Vec<FeatureId>> for FeatureSet {
    type Error = Error;

    fn try_from(ids: Vec<FeatureId>) -> Result<Self> {
        Self::new(ids)
    }
}

impl From<FeatureSet> for Vec<FeatureId> {
    fn from(set: FeatureSet) -> Self {
        set.0
    }
}

/// Feature values of one channel and frame, in the order of the active [`FeatureSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFrame {
    pub values: Vec<f64>,
    pub energy: f64,
    pub entropy_neg: f64,
}

impl FeatureFrame {
    /// Copy with every field rounded through binary32, as transmitted on the wire.
    pub fn quantized(&self) -> Self {
        let q = |x: f64| x as f32 as f64;
        Self {
            values: self.values.iter().map(|&v| q(v)).collect(),
            energy: q(self.energy),
            entropy_neg: q(self.entropy_neg),
        }
    }
}

/// Block-wise feature extractor; owns the FFT plan and window.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    dft: WindowedDft,
}

impl FeatureExtractor {
    pub fn new(block_len: usize) -> Result<Self> {
        Ok(Self {
            dft: WindowedDft::new(block_len)?,
        })
    }

    pub fn block_len(&self) -> usize {
        self.dft.len()
    }

    pub fn magnitude_spectrum(&self, samples: &[f64]) -> Result<Vec<f64>> {
        self.dft.magnitude(samples)
    }

    /// All 18 descriptors of a block, indexed by [`FeatureId::index`]; the
    /// `entropy` slot is filled with `entropy_neg`. Returns the block's
    /// magnitude spectrum alongside for use as the next predecessor.
    pub fn all_features(
        &self,
        samples: &[f64],
        prev_mag: Option<&[f64]>,
        entropy_neg: f64,
    ) -> Result<([f64; FeatureId::COUNT], Vec<f64>)> {
        let mag = self.dft.magnitude(samples)?;
        if let Some(prev) = prev_mag {
            if prev.len() != mag.len() {
                return Err(Error::Dimension {
                    what: "previous magnitude spectrum",
                    expected: mag.len(),
                    actual: prev.len(),
                });
            }
        }
        let mut out = [0.0; FeatureId::COUNT];
        temporal::fill(samples, &mut out);
        spectral::fill(&mag, prev_mag, &mut out);
        out[FeatureId::Entropy.index()] = entropy_neg;
        Ok((out, mag))
    }

    pub fn extract(
        &self,
        block: &SignalBlock<'_>,
        prev_mag: Option<&[f64]>,
        active: &FeatureSet,
        entropy_neg: f64,
    ) -> Result<(FeatureFrame, Vec<f64>)> {
        let (all, mag) = self.all_features(block.samples, prev_mag, entropy_neg)?;
        let frame = FeatureFrame {
            values: active.ids().iter().map(|id| all[id.index()]).collect(),
            energy: frame_energy(block),
            entropy_neg,
        };
        Ok((frame, mag))
    }
}

/// One-shot convenience around [`FeatureExtractor::extract`] with no entropy side information.
pub fn extract_features(
    block: &SignalBlock<'_>,
    prev_mag: Option<&[f64]>,
    active: &FeatureSet,
) -> Result<(FeatureFrame, Vec<f64>)> {
    FeatureExtractor::new(block.len())?.extract(block, prev_mag, active, 0.0)
}

/// Block geometry for a channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Framing {
    pub sample_rate: f64,
    pub block_len: usize,
    pub shift: usize,
    pub entropy_block_len: usize,
}

impl Default for Framing {
    fn default() -> Self {
        Self {
            sample_rate: 16_000.0,
            block_len: 1024,
            shift: 512,
            entropy_block_len: 32_000,
        }
    }
}

impl Framing {
    pub fn frames(&self, signal_len: usize) -> usize {
        frame_count(signal_len, self.block_len, self.shift)
    }

    pub fn frame_time(&self, frame: usize) -> f64 {
        (frame * self.shift) as f64 / self.sample_rate
    }
}

/// Negated level-free entropy ([`standardized_entropy`]) seen by each frame.
///
/// Entropy is re-estimated once per complete entropy block (no overlap) and
/// held; frame `l` uses the newest block that has fully arrived by the end of
/// the frame. Before the first block completes, the prefix received so far is
/// used instead.
pub fn entropy_track(signal: &[f64], framing: &Framing) -> Result<Vec<f64>> {
    let frames = framing.frames(signal.len());
    let eb = framing.entropy_block_len;
    if eb < 2 {
        return Err(Error::Config(format!(
            "entropy block length must be >= 2, got {eb}"
        )));
    }
    let mut out = Vec::with_capacity(frames);
    let mut held: Option<(usize, f64)> = None;
    for l in 0..frames {
        let end = l * framing.shift + framing.block_len;
        let complete = end / eb;
        let value = if complete == 0 {
            -standardized_entropy(&signal[..end])?
        } else {
            match held {
                Some((k, v)) if k == complete => v,
                _ => {
                    let v = -standardized_entropy(&signal[(complete - 1) * eb..complete * eb])?;
                    held = Some((complete, v));
                    v
                }
            }
        };
        out.push(value);
    }
    Ok(out)
}

/// Extract features for every frame of one channel.
pub fn extract_channel(
    signal: &[f64],
    channel_index: usize,
    framing: &Framing,
    active: &FeatureSet,
) -> Result<Vec<FeatureFrame>> {
    let blocks = frame_signal(
        signal,
        framing.block_len,
        framing.shift,
        channel_index,
        framing.sample_rate,
    )?;
    let entropy = entropy_track(signal, framing)?;
    let extractor = FeatureExtractor::new(framing.block_len)?;
    let mut prev: Option<Vec<f64>> = None;
    let mut frames = Vec::with_capacity(blocks.len());
    for (block, &e) in blocks.iter().zip(&entropy) {
        let (frame, mag) = extractor.extract(block, prev.as_deref(), active, e)?;
        prev = Some(mag);
        frames.push(frame);
    }
    Ok(frames)
}
