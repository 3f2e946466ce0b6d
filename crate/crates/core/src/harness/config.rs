//! Run configuration, loaded from strict JSON.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::{FeatureSet, Framing};
use crate::lasso::{TrialWeighting, SWEEP_LAMBDAS};
use crate::msc::DEFAULT_PSD_SMOOTHING;
use crate::sim::trajectory::{canonical_windows, REST_JITTER};
use crate::sim::{RoomSpec, SceneRecipe, SignalKind};
use crate::tracker::KfConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SceneConfig {
    pub rooms: Vec<RoomSpec>,
    pub mic_count: usize,
    pub snr_db: f64,
    pub duration_s: f64,
    pub signal: SignalKind,
    pub move_windows: Vec<(f64, f64)>,
    pub rest_jitter: f64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            rooms: RoomSpec::presets().to_vec(),
            mic_count: 10,
            snr_db: 10.0,
            duration_s: 20.0,
            signal: SignalKind::Speechlike,
            move_windows: canonical_windows(20.0),
            rest_jitter: REST_JITTER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LassoConfig {
    pub lambdas: Vec<f64>,
    pub weighting: TrialWeighting,
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for LassoConfig {
    fn default() -> Self {
        Self {
            lambdas: SWEEP_LAMBDAS.to_vec(),
            weighting: TrialWeighting::Mean,
            tol: 1e-8,
            max_sweeps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub scene: SceneConfig,
    pub kf: KfConfig,
    pub features: FeatureSet,
    pub framing: Framing,
    pub psd_smoothing: f64,
    pub seeds: Vec<u64>,
    pub lasso: LassoConfig,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scene: SceneConfig::default(),
            kf: KfConfig::default(),
            features: FeatureSet::default(),
            framing: Framing::default(),
            psd_smoothing: DEFAULT_PSD_SMOOTHING,
            seeds: (0..10).collect(),
            lasso: LassoConfig::default(),
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.kf.validate()?;
        if self.scene.rooms.is_empty() {
            return Err(Error::Config("scene.rooms is empty".into()));
        }
        for room in &self.scene.rooms {
            room.validate()?;
        }
        if self.scene.mic_count < 2 {
            return Err(Error::Config("scene.mic_count must be at least 2".into()));
        }
        if self.scene.duration_s.is_nan() || self.scene.duration_s <= 0.0 {
            return Err(Error::Config("scene.duration_s must be positive".into()));
        }
        let f = &self.framing;
        if f.block_len < 2 || f.shift == 0 || f.shift > f.block_len || f.sample_rate <= 0.0 {
            return Err(Error::Config(format!("invalid framing {f:?}")));
        }
        if !(0.0..1.0).contains(&self.psd_smoothing) {
            return Err(Error::Config("psd_smoothing must be in [0, 1)".into()));
        }
        Ok(())
    }

    pub fn recipe(&self, room: &RoomSpec) -> SceneRecipe {
        SceneRecipe {
            room: room.clone(),
            mic_count: self.scene.mic_count,
            signal: self.scene.signal,
            duration: self.scene.duration_s,
            snr_db: self.scene.snr_db,
            move_windows: self.scene.move_windows.clone(),
            rest_jitter: self.scene.rest_jitter,
            sample_rate: self.framing.sample_rate,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    parse_config(&fs::read_to_string(path)?)
}

/// SHA-256 of the canonical JSON form, hex encoded.
pub fn config_hash(cfg: &RunConfig) -> String {
    let bytes = serde_json::to_vec(cfg).expect("config serializes");
    hex::encode(Sha256::digest(&bytes))
}
