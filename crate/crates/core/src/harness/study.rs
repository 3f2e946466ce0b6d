//! Feature-importance study: LASSO over the channel matrices of simulated trials.

use nalgebra::DMatrix;

use super::trial::ChannelFeatures;
use crate::error::{Error, Result};
use crate::estimator::build_channel_matrices;
use crate::features::FeatureFrame;
use crate::lasso::LassoProblem;
use crate::msc::MscVector;
use crate::tracker::{FeatureTracker, KfConfig};

/// Per frame, the channel matrices `M_p` of the tracked PCCs paired with the MSC vector.
pub fn dictionary_frames(
    features: &ChannelFeatures,
    msc: &[MscVector],
    kf: KfConfig,
) -> Result<Vec<(Vec<DMatrix<f64>>, MscVector)>> {
    let channels = features.len();
    let width = features
        .first()
        .and_then(|ch| ch.first())
        .map(|f| f.values.len())
        .ok_or_else(|| Error::InsufficientInput("no feature frames".into()))?;
    let frames = features
        .iter()
        .map(Vec::len)
        .min()
        .unwrap_or(0)
        .min(msc.len());
    let mut tracker = FeatureTracker::new(channels, width, kf)?;
    let mut out = Vec::with_capacity(frames);
    let mut current: Vec<FeatureFrame> = Vec::with_capacity(channels);
    for (l, gamma) in msc.iter().enumerate().take(frames) {
        current.clear();
        current.extend(features.iter().map(|ch| ch[l].clone()));
        tracker.update(&current)?;
        out.push((
            build_channel_matrices(&tracker.pcc_matrices()),
            gamma.clone(),
        ));
    }
    Ok(out)
}

pub fn add_trial(
    problem: &mut LassoProblem,
    features: &ChannelFeatures,
    msc: &[MscVector],
    kf: KfConfig,
) -> Result<()> {
    problem.add_trial(&dictionary_frames(features, msc, kf)?)
}
