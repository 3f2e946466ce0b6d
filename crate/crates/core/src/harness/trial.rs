//! Single-trial pipeline: render, extract, track, estimate, score.

use crate::error::{Error, Result};
use crate::estimator::{StepOutput, UtilityEstimator};
use crate::features::{
    entropy_track, frame_energy, frame_signal, FeatureExtractor, FeatureFrame, FeatureSet, Framing,
};
use crate::msc::{msc_track, MscVector};
use crate::sim::{render_scene, Rendered, RoomSpec, Scene};
use crate::stats::pcc;
use crate::tracker::{FeatureTracker, KfConfig};
use crate::wire::FeatureWireFrame;

use super::config::{config_hash, RunConfig};

/// Per-channel feature sequences: `[channel][frame]`.
pub type ChannelFeatures = Vec<Vec<FeatureFrame>>;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub room: String,
    pub seed: u64,
    pub frame_times: Vec<f64>,
    /// `None` where either vector has zero variance.
    pub rho: Vec<Option<f64>>,
    pub utility: Vec<Vec<f64>>,
    pub msc: Vec<MscVector>,
    pub config_hash: String,
}

pub fn rho_metric(u: &[f64], gamma: &[f64]) -> Option<f64> {
    if u.len() != gamma.len() {
        return None;
    }
    pcc(u, gamma)
}

pub fn simulate(cfg: &RunConfig, room: &RoomSpec, seed: u64) -> Result<(Scene, Rendered)> {
    let scene = Scene::generate(&cfg.recipe(room), seed)?;
    let rendered = render_scene(&scene)?;
    Ok((scene, rendered))
}

/// All 18 descriptors for every channel and frame.
pub fn extract_all(mics: &[Vec<f64>], framing: &Framing) -> Result<ChannelFeatures> {
    let extractor = FeatureExtractor::new(framing.block_len)?;
    mics.iter()
        .enumerate()
        .map(|(ch, signal)| {
            let blocks = frame_signal(
                signal,
                framing.block_len,
                framing.shift,
                ch,
                framing.sample_rate,
            )?;
            let entropy = entropy_track(signal, framing)?;
            let mut prev: Option<Vec<f64>> = None;
            blocks
                .iter()
                .zip(entropy)
                .map(|(block, e)| {
                    let (values, mag) =
                        extractor.all_features(block.samples, prev.as_deref(), e)?;
                    prev = Some(mag);
                    Ok(FeatureFrame {
                        values: values.to_vec(),
                        energy: frame_energy(block),
                        entropy_neg: e,
                    })
                })
                .collect()
        })
        .collect()
}

/// Restrict full 18-feature frames to `set`, in its order.
pub fn select_features(all: &ChannelFeatures, set: &FeatureSet) -> ChannelFeatures {
    all.iter()
        .map(|ch| {
            ch.iter()
                .map(|f| FeatureFrame {
                    values: set.ids().iter().map(|id| f.values[id.index()]).collect(),
                    energy: f.energy,
                    entropy_neg: f.entropy_neg,
                })
                .collect()
        })
        .collect()
}

/// Run the tracker and estimator over every frame; `inspect` sees each step.
pub fn estimate_utilities(
    features: &ChannelFeatures,
    kf: KfConfig,
    mut inspect: impl FnMut(usize, &FeatureTracker, &StepOutput),
) -> Result<Vec<Vec<f64>>> {
    let channels = features.len();
    let Some(first) = features.first().and_then(|ch| ch.first()) else {
        return Err(Error::InsufficientInput("no feature frames".into()));
    };
    let frames = features.iter().map(Vec::len).min().unwrap_or(0);
    let mut tracker = FeatureTracker::new(channels, first.values.len(), kf)?;
    let mut estimator = UtilityEstimator::new(channels);
    let mut out = Vec::with_capacity(frames);
    let mut current: Vec<FeatureFrame> = Vec::with_capacity(channels);
    for l in 0..frames {
        current.clear();
        current.extend(features.iter().map(|ch| ch[l].clone()));
        tracker.update(&current)?;
        let entropy: Vec<f64> = current.iter().map(|f| f.entropy_neg).collect();
        let step = estimator.step(&tracker.pcc_matrices(), &entropy)?;
        inspect(l, &tracker, &step);
        out.push(step.utility.u.iter().copied().collect());
    }
    Ok(out)
}

pub fn ground_truth(rendered: &Rendered, cfg: &RunConfig) -> Result<Vec<MscVector>> {
    msc_track(
        &rendered.dry,
        &rendered.mics,
        cfg.framing.block_len,
        cfg.framing.shift,
        cfg.psd_smoothing,
    )
}

pub fn rho_track(utility: &[Vec<f64>], msc: &[MscVector]) -> Vec<Option<f64>> {
    utility
        .iter()
        .zip(msc)
        .map(|(u, g)| rho_metric(u, g.as_slice()))
        .collect()
}

/// Node-side frames in transmission order: frame by frame, node by node.
pub fn to_wire(features: &ChannelFeatures) -> Vec<FeatureWireFrame> {
    let frames = features.iter().map(Vec::len).min().unwrap_or(0);
    (0..frames)
        .flat_map(|l| {
            features.iter().enumerate().map(move |(ch, seq)| {
                FeatureWireFrame::from_feature_frame(ch as u16, l as u32, &seq[l])
            })
        })
        .collect()
}

/// Regroup received frames by node; every node must deliver frames `0..L` exactly once.
pub fn from_wire(frames: &[FeatureWireFrame]) -> Result<ChannelFeatures> {
    let channels = frames
        .iter()
        .map(|f| f.node_id as usize + 1)
        .max()
        .unwrap_or(0);
    let len = frames
        .iter()
        .map(|f| f.frame_index as usize + 1)
        .max()
        .unwrap_or(0);
    let mut out: Vec<Vec<Option<FeatureFrame>>> = vec![vec![None; len]; channels];
    for f in frames {
        let seq = &mut out[f.node_id as usize];
        let l = f.frame_index as usize;
        if seq[l].replace(f.to_feature_frame()).is_some() {
            return Err(Error::Config(format!(
                "duplicate frame {l} from node {}",
                f.node_id
            )));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(node, seq)| {
            seq.into_iter()
                .enumerate()
                .map(|(l, f)| {
                    f.ok_or_else(|| Error::Config(format!("node {node} is missing frame {l}")))
                })
                .collect()
        })
        .collect()
}

pub fn frame_times(framing: &Framing, frames: usize) -> Vec<f64> {
    (0..frames).map(|l| framing.frame_time(l)).collect()
}

pub fn run_trial(cfg: &RunConfig, room: &RoomSpec, seed: u64) -> Result<TrialResult> {
    let (_, rendered) = simulate(cfg, room, seed)?;
    let features = select_features(&extract_all(&rendered.mics, &cfg.framing)?, &cfg.features);
    let utility = estimate_utilities(&features, cfg.kf, |_, _, _| {})?;
    let msc = ground_truth(&rendered, cfg)?;
    let rho = rho_track(&utility, &msc);
    Ok(TrialResult {
        room: room.name.clone(),
        seed,
        frame_times: frame_times(&cfg.framing, rho.len()),
        rho,
        utility,
        msc,
        config_hash: config_hash(cfg),
    })
}

/// Every (room, seed) pair of the configuration, in order. Failures are kept, not fatal.
pub fn run_batch(cfg: &RunConfig) -> Vec<(String, u64, Result<TrialResult>)> {
    cfg.scene
        .rooms
        .iter()
        .flat_map(|room| cfg.seeds.iter().map(move |&seed| (room, seed)))
        .map(|(room, seed)| (room.name.clone(), seed, run_trial(cfg, room, seed)))
        .collect()
}
