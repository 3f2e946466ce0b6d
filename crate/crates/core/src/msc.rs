//! Ground-truth source-to-microphone coherence.
//!
//! Auto- and cross-PSDs between the dry source and every microphone are
//! tracked with first-order recursive smoothing of Hann-windowed DFTs; the
//! magnitude-squared coherence is then averaged over the non-redundant bins.

use num_complex::Complex64;

use crate::dsp::WindowedDft;
use crate::error::{Error, Result};

/// Denominator factors below this contribute a zero bin.
const PSD_FLOOR: f64 = 1e-12;

pub const DEFAULT_PSD_SMOOTHING: f64 = 0.9;

/// Frequency-averaged MSC of each channel, every entry in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MscVector(pub Vec<f64>);

impl MscVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct PsdState {
    beta: f64,
    dft: WindowedDft,
    source_auto: Vec<f64>,
    mic_auto: Vec<Vec<f64>>,
    cross: Vec<Vec<Complex64>>,
    updates: usize,
}

impl PsdState {
    pub fn new(channels: usize, block_len: usize, beta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::Config(format!(
                "PSD smoothing must be in [0, 1), got {beta}"
            )));
        }
        let dft = WindowedDft::new(block_len)?;
        let bins = dft.bins();
        Ok(Self {
            beta,
            dft,
            source_auto: vec![0.0; bins],
            mic_auto: vec![vec![0.0; bins]; channels],
            cross: vec![vec![Complex64::new(0.0, 0.0); bins]; channels],
            updates: 0,
        })
    }

    pub fn bins(&self) -> usize {
        self.source_auto.len()
    }

    pub fn channels(&self) -> usize {
        self.mic_auto.len()
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    pub fn source_psd(&self) -> &[f64] {
        &self.source_auto
    }

    pub fn mic_psd(&self, channel: usize) -> &[f64] {
        &self.mic_auto[channel]
    }

    /// Fold one frame of source and microphone blocks into the PSD estimates.
    pub fn update(&mut self, source: &[f64], mics: &[&[f64]]) -> Result<()> {
        if mics.len() != self.channels() {
            return Err(Error::Dimension {
                what: "microphone blocks",
                expected: self.channels(),
                actual: mics.len(),
            });
        }
        if let Some(bad) = mics.iter().find(|m| m.len() != source.len()) {
            return Err(Error::Config(format!(
                "mismatched block lengths: source {}, microphone {}",
                source.len(),
                bad.len()
            )));
        }
        let s = self.dft.spectrum(source)?;
        let (b, g) = (self.beta, 1.0 - self.beta);
        for (acc, z) in self.source_auto.iter_mut().zip(&s) {
            *acc = b * *acc + g * z.norm_sqr();
        }
        for (ch, mic) in mics.iter().enumerate() {
            let x = self.dft.spectrum(mic)?;
            for k in 0..s.len() {
                self.mic_auto[ch][k] = b * self.mic_auto[ch][k] + g * x[k].norm_sqr();
                self.cross[ch][k] = self.cross[ch][k] * b + s[k] * x[k].conj() * g;
            }
        }
        self.updates += 1;
        Ok(())
    }

    /// Per-bin MSC of one channel, clamped to `[0, 1]`.
    pub fn bin_coherence(&self, channel: usize) -> Vec<f64> {
        (0..self.bins())
            .map(|k| {
                let ss = self.source_auto[k];
                let xx = self.mic_auto[channel][k];
                if ss < PSD_FLOOR || xx < PSD_FLOOR {
                    0.0
                } else {
                    (self.cross[channel][k].norm_sqr() / (ss * xx)).clamp(0.0, 1.0)
                }
            })
            .collect()
    }

    pub fn msc_vector(&self) -> MscVector {
        let bins = self.bins() as f64;
        MscVector(
            (0..self.channels())
                .map(|ch| self.bin_coherence(ch).iter().sum::<f64>() / bins)
                .collect(),
        )
    }
}

/// Run the oracle over whole signals, one MSC vector per frame.
pub fn msc_track(
    source: &[f64],
    mics: &[Vec<f64>],
    block_len: usize,
    shift: usize,
    beta: f64,
) -> Result<Vec<MscVector>> {
    let frames = crate::features::frame_count(source.len(), block_len, shift);
    if frames == 0 {
        return Err(Error::InsufficientInput(
            "source shorter than one block".into(),
        ));
    }
    if let Some(m) = mics.iter().find(|m| m.len() < source.len()) {
        return Err(Error::Config(format!(
            "microphone signal has {} samples, source has {}",
            m.len(),
            source.len()
        )));
    }
    let mut state = PsdState::new(mics.len(), block_len, beta)?;
    let mut out = Vec::with_capacity(frames);
    for l in 0..frames {
        let r = l * shift..l * shift + block_len;
        let blocks: Vec<&[f64]> = mics.iter().map(|m| &m[r.clone()]).collect();
        state.update(&source[r], &blocks)?;
        out.push(state.msc_vector());
    }
    Ok(out)
}
